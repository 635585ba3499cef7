#pragma once

// Shared generators for the unit and acceptance suites. Nothing here calls
// into the library's math; oracles are written out longhand.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "genbench/embedstore.hpp"

namespace gbtest {

using genbench::EmbeddingSet;
using genbench::Matrix;
using genbench::SourceKind;

inline std::vector<std::string> class_names(std::size_t c) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < c; ++j) names.push_back("class_" + std::to_string(j));
  return names;
}

inline void normalize_row(std::span<float> row) {
  double s = 0.0;
  for (float v : row) s += static_cast<double>(v) * v;
  const double norm = std::sqrt(s);
  for (auto& v : row) v = static_cast<float>(v / norm);
}

/// N rows, every class present at least once (requires n >= c).
inline EmbeddingSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t f, std::size_t c,
                               bool normalized = true, SourceKind kind = SourceKind::generative) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(c) - 1);
  EmbeddingSet set;
  set.vectors = Matrix<float>(n, f);
  for (auto& v : set.vectors.values()) v = gauss(rng);
  if (normalized) {
    for (std::size_t i = 0; i < n; ++i) normalize_row(set.vectors.row(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    set.labels.push_back(i < c ? static_cast<std::int32_t>(i) : pick(rng));
  }
  set.class_names = class_names(c);
  set.normalized = normalized;
  set.source_kind = kind;
  return set;
}

/// Gaussian blobs around well separated random unit means.
inline EmbeddingSet blob_set(std::uint64_t seed, std::size_t per_class, std::size_t f, std::size_t c,
                             double spread, SourceKind kind) {
  std::mt19937_64 means_rng(12345);  // same means for every caller
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> means(c, std::vector<double>(f));
  for (auto& m : means) {
    double s = 0.0;
    for (auto& v : m) {
      v = gauss(means_rng);
      s += v * v;
    }
    for (auto& v : m) v /= std::sqrt(s);
  }
  std::mt19937_64 rng(seed);
  EmbeddingSet set;
  set.vectors = Matrix<float>(per_class * c, f);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t k = 0; k < per_class; ++k) {
      const std::size_t i = j * per_class + k;
      auto row = set.vectors.row(i);
      for (std::size_t d = 0; d < f; ++d) row[d] = static_cast<float>(means[j][d] + spread * gauss(rng));
      normalize_row(row);
      set.labels.push_back(static_cast<std::int32_t>(j));
    }
  }
  set.class_names = class_names(c);
  set.normalized = true;
  set.source_kind = kind;
  return set;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("genbench_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace gbtest
