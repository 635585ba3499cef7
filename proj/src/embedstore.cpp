#include "genbench/embedstore.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

namespace genbench {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 8> kReservedKeys = {
    "version", "n", "f", "c", "dtype", "normalized", "source_kind", "class_names"};

bool is_reserved(std::string_view key) {
  for (auto reserved : kReservedKeys) {
    if (reserved == key) return true;
  }
  return false;
}

void put_u32(std::string& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((value >> shift) & 0xFFu));
  }
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

std::size_t header_size(const json& header, const char* key) {
  const auto it = header.find(key);
  if (it == header.end() || !it->is_number_unsigned()) {
    throw FormatError(std::string("header field '") + key + "' missing or not an unsigned integer");
  }
  return it->get<std::size_t>();
}

}  // namespace

std::string_view to_string(SourceKind kind) noexcept {
  switch (kind) {
    case SourceKind::generative: return "generative";
    case SourceKind::retrieval: return "retrieval";
    case SourceKind::original: return "original";
    case SourceKind::test: return "test";
    case SourceKind::text: return "text";
  }
  return "unknown";
}

SourceKind parse_source_kind(std::string_view name) {
  for (auto kind : {SourceKind::generative, SourceKind::retrieval, SourceKind::original,
                    SourceKind::test, SourceKind::text}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown source kind '" + std::string(name) + "'");
}

void require_unit_rows(const Matrix<float>& vectors, std::string_view what, double tolerance) {
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    const double norm = std::sqrt(squared_norm(vectors.row(i)));
    if (!(std::abs(norm - 1.0) <= tolerance)) {
      std::ostringstream msg;
      msg << what << ": row " << i << " has L2 norm " << norm << ", expected unit norm";
      throw ValidationError(msg.str());
    }
  }
}

void check_invariants(const EmbeddingSet& set) {
  if (set.size() == 0) throw ValidationError("embedding set has no rows");
  if (set.dim() == 0) throw ValidationError("embedding set has zero dimension");
  if (set.class_names.empty()) throw ValidationError("embedding set has no class names");
  if (set.labels.size() != set.size()) {
    throw ValidationError("embedding set has " + std::to_string(set.labels.size()) +
                          " labels for " + std::to_string(set.size()) + " rows");
  }
  std::set<std::string_view> seen;
  for (const auto& name : set.class_names) {
    if (name.empty()) throw ValidationError("empty class name");
    if (!seen.insert(name).second) throw ValidationError("duplicate class name '" + name + "'");
  }
  const auto classes = static_cast<std::int64_t>(set.num_classes());
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    const auto label = set.labels[i];
    if (label != kUnlabeled && (label < 0 || label >= classes)) {
      throw ValidationError("label " + std::to_string(label) + " at row " + std::to_string(i) +
                            " is outside [0, " + std::to_string(classes) + ")");
    }
  }
  for (float v : set.vectors.values()) {
    if (!std::isfinite(v)) throw ValidationError("embedding set contains a non-finite value");
  }
  if (set.normalized) require_unit_rows(set.vectors, "normalized embedding set");
  if (!set.metadata.is_object()) throw ValidationError("metadata must be a JSON object");
  for (const auto& item : set.metadata.items()) {
    if (is_reserved(item.key())) {
      throw ValidationError("metadata key '" + item.key() + "' collides with a header field");
    }
  }
}

void require_labeled(const EmbeddingSet& set, std::string_view what) {
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    const auto label = set.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= set.num_classes()) {
      throw ValidationError(std::string(what) + ": row " + std::to_string(i) +
                            " has no valid class label");
    }
  }
}

std::string encode_embedding_set(const EmbeddingSet& set) {
  check_invariants(set);

  json header = set.metadata;
  header["version"] = 1;
  header["n"] = set.size();
  header["f"] = set.dim();
  header["c"] = set.num_classes();
  header["dtype"] = "f32";
  header["normalized"] = set.normalized;
  header["source_kind"] = std::string(to_string(set.source_kind));
  header["class_names"] = set.class_names;
  const std::string text = header.dump();
  if (text.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("header too large");
  }

  std::string out;
  out.reserve(8 + text.size() + 4 * set.size() * (set.dim() + 1));
  out.append(kGbeMagic);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.append(text);
  for (auto label : set.labels) put_u32(out, std::bit_cast<std::uint32_t>(label));
  for (float v : set.vectors.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingSet decode_embedding_set(std::string_view bytes) {
  if (bytes.size() < 8) throw FormatError("truncated file: missing magic or header length");
  if (bytes.substr(0, 4) != kGbeMagic) throw FormatError("bad magic, expected \"GBE1\"");
  const std::size_t header_length = get_u32(bytes, 4);
  if (bytes.size() - 8 < header_length) throw FormatError("truncated header");

  const json header = json::parse(bytes.substr(8, header_length), nullptr, false);
  if (header.is_discarded() || !header.is_object()) throw FormatError("header is not a JSON object");
  if (header.value("version", json()) != json(1)) throw FormatError("unsupported format version");
  if (header.value("dtype", json()) != json("f32")) throw FormatError("unsupported dtype");

  const std::size_t n = header_size(header, "n");
  const std::size_t f = header_size(header, "f");
  const std::size_t c = header_size(header, "c");
  const auto names = header.find("class_names");
  if (names == header.end() || !names->is_array() || names->size() != c) {
    throw FormatError("class_names missing or inconsistent with c");
  }
  const auto normalized = header.find("normalized");
  if (normalized == header.end() || !normalized->is_boolean()) {
    throw FormatError("header field 'normalized' missing or not a boolean");
  }
  const auto kind = header.find("source_kind");
  if (kind == header.end() || !kind->is_string()) {
    throw FormatError("header field 'source_kind' missing or not a string");
  }

  const std::size_t payload = bytes.size() - 8 - header_length;
  if (f != 0 && n > std::numeric_limits<std::size_t>::max() / 4 / (f + 1)) {
    throw FormatError("header dimensions overflow");
  }
  const std::size_t expected = 4 * n * (f + 1);
  if (payload < expected) throw FormatError("truncated payload");
  if (payload > expected) throw FormatError("unexpected trailing bytes after payload");

  EmbeddingSet set;
  for (const auto& name : *names) {
    if (!name.is_string()) throw FormatError("class name is not a string");
    set.class_names.push_back(name.get<std::string>());
  }
  set.normalized = normalized->get<bool>();
  try {
    set.source_kind = parse_source_kind(kind->get<std::string>());
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
  for (const auto& item : header.items()) {
    if (!is_reserved(item.key())) set.metadata[item.key()] = item.value();
  }

  std::size_t offset = 8 + header_length;
  set.labels.resize(n);
  for (auto& label : set.labels) {
    label = std::bit_cast<std::int32_t>(get_u32(bytes, offset));
    offset += 4;
  }
  std::vector<float> values(n * f);
  for (auto& v : values) {
    v = std::bit_cast<float>(get_u32(bytes, offset));
    offset += 4;
  }
  set.vectors = Matrix<float>(n, f, std::move(values));

  check_invariants(set);
  return set;
}

EmbeddingSet load_embedding_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return decode_embedding_set(bytes);
}

void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& path) {
  const std::string bytes = encode_embedding_set(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

EmbeddingSet l2_normalize(EmbeddingSet set) {
  for (std::size_t i = 0; i < set.vectors.rows(); ++i) {
    auto row = set.vectors.row(i);
    const double norm = std::sqrt(squared_norm(std::span<const float>(row)));
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw DegenerateVectorError("row " + std::to_string(i) + " has zero or non-finite norm", i);
    }
    for (auto& v : row) v = static_cast<float>(static_cast<double>(v) / norm);
  }
  set.normalized = true;
  return set;
}

TextEmbeddings make_text_embeddings(Matrix<float> vectors, std::vector<std::string> class_names) {
  if (class_names.empty()) throw ValidationError("text embeddings need at least one class");
  if (vectors.rows() != class_names.size()) {
    throw ShapeError("text embeddings have " + std::to_string(vectors.rows()) + " rows for " +
                     std::to_string(class_names.size()) + " classes");
  }
  if (vectors.cols() == 0) throw ShapeError("text embeddings have zero dimension");
  require_unit_rows(vectors, "text embeddings");
  return TextEmbeddings{std::move(vectors), std::move(class_names)};
}

TextEmbeddings text_embeddings_from_set(const EmbeddingSet& set) {
  const std::size_t classes = set.num_classes();
  if (set.size() != classes) {
    throw ValidationError("text embedding file must hold one row per class (" +
                          std::to_string(set.size()) + " rows, " + std::to_string(classes) +
                          " classes)");
  }
  require_labeled(set, "text embeddings");
  Matrix<float> ordered(classes, set.dim());
  std::vector<bool> filled(classes, false);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto label = static_cast<std::size_t>(set.labels[i]);
    if (filled[label]) {
      throw ValidationError("class '" + set.class_names[label] + "' has more than one text row");
    }
    filled[label] = true;
    std::ranges::copy(set.row(i), ordered.row(label).begin());
  }
  return make_text_embeddings(std::move(ordered), set.class_names);
}

}  // namespace genbench
