#include "genbench/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace genbench {

namespace {

double clamp_similarity(double s) { return std::clamp(s, -1.0, 1.0); }

void check_query(std::span<const float> query, std::size_t dim) {
  if (query.size() != dim) {
    throw ShapeError("query has dimension " + std::to_string(query.size()) + ", corpus has " +
                     std::to_string(dim));
  }
  const double norm = std::sqrt(squared_norm(query));
  if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
    throw ValidationError("retrieval query must be unit norm");
  }
}

}  // namespace

RetrievalIndex::RetrievalIndex(EmbeddingSet corpus, std::vector<std::string> ids)
    : corpus_(std::move(corpus)), ids_(std::move(ids)) {
  check_invariants(corpus_);
  if (ids_.size() != corpus_.size()) {
    throw ValidationError("corpus has " + std::to_string(corpus_.size()) + " rows but " +
                          std::to_string(ids_.size()) + " ids");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (id.empty()) throw ValidationError("corpus ids must be non-empty");
    if (!seen.insert(id).second) throw ValidationError("duplicate corpus id '" + id + "'");
  }
  require_unit_rows(corpus_.vectors, "retrieval corpus");
}

RetrievalIndex RetrievalIndex::load(const std::filesystem::path& corpus_path,
                                    const std::filesystem::path& ids_path) {
  return RetrievalIndex(load_embedding_set(corpus_path), read_id_list(ids_path));
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open id list '" + path.string() + "'");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ids.push_back(line);
  }
  return ids;
}

std::vector<RetrievalHit> topk(const RetrievalIndex& index, std::span<const float> query,
                               std::size_t k) {
  if (k == 0) throw ValidationError("k must be positive");
  if (k > index.size()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds corpus size " +
                          std::to_string(index.size()));
  }
  check_query(query, index.dim());

  const auto& corpus = index.corpus();
  const auto& ids = index.ids();
  std::vector<double> sims(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) sims[i] = clamp_similarity(dot(corpus.row(i), query));

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return ids[a] < ids[b];
                    });

  std::vector<RetrievalHit> hits;
  hits.reserve(k);
  for (std::size_t r = 0; r < k; ++r) hits.push_back({ids[order[r]], sims[order[r]], r + 1});
  return hits;
}

double category_mts(const RetrievalIndex& index, std::span<const float> query, std::size_t k) {
  const auto hits = topk(index, query, k);
  double total = 0.0;
  for (const auto& hit : hits) total += hit.similarity;
  return clamp_similarity(total / static_cast<double>(hits.size()));
}

double dataset_mts(std::span<const double> per_category) {
  if (per_category.empty()) throw ValidationError("dataset MTS needs at least one category");
  double total = 0.0;
  for (double v : per_category) total += v;
  return total / static_cast<double>(per_category.size());
}

std::vector<std::string> select_retrieval_shots(std::span<const RetrievalHit> hits, std::size_t n) {
  if (n > hits.size()) {
    throw InsufficientHitsError("requested " + std::to_string(n) + " shots from " +
                                std::to_string(hits.size()) + " hits");
  }
  std::vector<const RetrievalHit*> ranked;
  ranked.reserve(hits.size());
  for (const auto& hit : hits) ranked.push_back(&hit);
  std::stable_sort(ranked.begin(), ranked.end(), [](const RetrievalHit* a, const RetrievalHit* b) {
    if (a->similarity != b->similarity) return a->similarity > b->similarity;
    return a->id < b->id;
  });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i]->id);
  return out;
}

std::vector<std::size_t> filter_by_similarity(const EmbeddingSet& candidates,
                                              std::span<const float> query, double threshold) {
  if (query.size() != candidates.dim()) {
    throw ShapeError("query and candidates differ in dimension");
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (clamp_similarity(dot(candidates.row(i), query)) >= threshold) kept.push_back(i);
  }
  return kept;
}

}  // namespace genbench
