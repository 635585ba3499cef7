#pragma once

// Embedding interchange format (.gbe) and the in-memory embedding sets every
// metric consumes.
//
// Layout, all integers little-endian:
//   "GBE1"                      4 bytes magic
//   u32 header_length           byte length of the JSON header
//   header                      UTF-8 JSON object:
//                                 {version:1, n, f, c, dtype:"f32", normalized,
//                                  source_kind, class_names, ...extra keys}
//   i32 labels[n]               -1 marks an unlabeled row
//   f32 vectors[n*f]            row-major
//
// The header is serialized with sorted keys and no whitespace, so saving the
// same set twice produces identical bytes.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "genbench/matrix.hpp"

namespace genbench {

enum class SourceKind { generative, retrieval, original, test, text };

std::string_view to_string(SourceKind kind) noexcept;
SourceKind parse_source_kind(std::string_view name);

inline constexpr std::int32_t kUnlabeled = -1;
inline constexpr double kUnitNormTolerance = 1e-4;
inline constexpr std::string_view kGbeMagic = "GBE1";

struct EmbeddingSet {
  Matrix<float> vectors;
  std::vector<std::int32_t> labels;
  std::vector<std::string> class_names;
  bool normalized = false;
  SourceKind source_kind = SourceKind::original;
  /// Header keys outside the core schema (backbone name, probe metadata...).
  /// Preserved verbatim through save/load.
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t size() const noexcept { return vectors.rows(); }
  std::size_t dim() const noexcept { return vectors.cols(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::span<const float> row(std::size_t i) const noexcept { return vectors.row(i); }

  bool operator==(const EmbeddingSet&) const = default;
};

/// Throws ValidationError when any EmbeddingSet invariant is broken.
void check_invariants(const EmbeddingSet& set);

/// Throws ValidationError unless every label is a real class index.
void require_labeled(const EmbeddingSet& set, std::string_view what);

/// Throws ValidationError unless every row has unit norm within tolerance.
void require_unit_rows(const Matrix<float>& vectors, std::string_view what,
                       double tolerance = kUnitNormTolerance);

std::string encode_embedding_set(const EmbeddingSet& set);
EmbeddingSet decode_embedding_set(std::string_view bytes);

EmbeddingSet load_embedding_set(const std::filesystem::path& path);
void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path);

/// Rescales every row to unit L2 norm. Throws DegenerateVectorError on a
/// zero row.
EmbeddingSet l2_normalize(EmbeddingSet set);

/// One unit-norm text embedding per class, row j belonging to class j.
struct TextEmbeddings {
  Matrix<float> vectors;
  std::vector<std::string> class_names;

  std::size_t num_classes() const noexcept { return class_names.size(); }
};

TextEmbeddings make_text_embeddings(Matrix<float> vectors, std::vector<std::string> class_names);

/// Reorders the rows of a text-kind set so that row j holds class j. Every
/// class must appear exactly once.
TextEmbeddings text_embeddings_from_set(const EmbeddingSet& set);

}  // namespace genbench
