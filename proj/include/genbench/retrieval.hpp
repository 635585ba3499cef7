#pragma once

// Exact cosine k-NN over a local text-embedding corpus. Used to pick
// retrieval shots, to compute mean text similarity (MTS) per category and per
// dataset, and to threshold candidate captions against a reference query.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "genbench/embedstore.hpp"

namespace genbench {

inline constexpr std::size_t kDefaultRetrievalK = 100;

struct RetrievalHit {
  std::string id;
  double similarity;  // clamped to [-1, 1]
  std::size_t rank;   // 1-based

  bool operator==(const RetrievalHit&) const = default;
};

/// Immutable corpus of unit-norm rows, each with a unique string id.
class RetrievalIndex {
 public:
  RetrievalIndex(EmbeddingSet corpus, std::vector<std::string> ids);

  /// Corpus .gbe plus a sidecar with one UTF-8 id per line, in row order.
  static RetrievalIndex load(const std::filesystem::path& corpus_path,
                             const std::filesystem::path& ids_path);

  const EmbeddingSet& corpus() const noexcept { return corpus_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return corpus_.size(); }
  std::size_t dim() const noexcept { return corpus_.dim(); }

 private:
  EmbeddingSet corpus_;
  std::vector<std::string> ids_;
};

std::vector<std::string> read_id_list(const std::filesystem::path& path);

/// The k most similar rows, sorted by similarity descending then id ascending.
std::vector<RetrievalHit> topk(const RetrievalIndex& index, std::span<const float> query,
                               std::size_t k);

/// Mean similarity of the top-k hits.
double category_mts(const RetrievalIndex& index, std::span<const float> query, std::size_t k);

/// Unweighted mean of per-category MTS values.
double dataset_mts(std::span<const double> per_category);

/// Ids of the n best hits in rank order.
std::vector<std::string> select_retrieval_shots(std::span<const RetrievalHit> hits, std::size_t n);

/// Ascending indices of candidate rows whose cosine to `query` is at least
/// `threshold`.
std::vector<std::size_t> filter_by_similarity(const EmbeddingSet& candidates,
                                              std::span<const float> query, double threshold);

}  // namespace genbench
