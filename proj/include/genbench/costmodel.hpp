#pragma once

// Data-acquisition cost accounting. Amounts are held as integer nano-USD so
// that cost is exactly linear in shot count.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "genbench/embedstore.hpp"

namespace genbench {

class Usd {
 public:
  constexpr Usd() = default;
  static constexpr Usd from_nano(std::int64_t nano) { return Usd(nano); }
  /// Rounds to the nearest nano-USD. Throws ValidationError when out of range.
  static Usd from_dollars(double dollars);

  constexpr std::int64_t nano() const noexcept { return nano_; }
  constexpr double dollars() const noexcept { return static_cast<double>(nano_) * 1e-9; }
  /// Rounded to cents, e.g. "208.03".
  std::string to_string() const;

  constexpr auto operator<=>(const Usd&) const = default;

 private:
  constexpr explicit Usd(std::int64_t nano) : nano_(nano) {}
  std::int64_t nano_ = 0;
};

class CostTable {
 public:
  /// Every rate must be positive. Throws ValidationError otherwise.
  explicit CostTable(std::map<SourceKind, Usd> per_image);

  Usd rate(SourceKind kind) const;
  bool contains(SourceKind kind) const { return per_image_.contains(kind); }
  const std::map<SourceKind, Usd>& rates() const noexcept { return per_image_; }

 private:
  std::map<SourceKind, Usd> per_image_;
};

/// generative 2.54e-4, retrieval 3.93e-5, original 1.20e-2 USD per image.
CostTable default_cost_table();

/// {"generative": .., "retrieval": .., "original": ..}; keys may be a subset.
CostTable parse_cost_table(const nlohmann::json& doc);
CostTable load_cost_table(const std::filesystem::path& path);

/// rate * shots * n_categories. Throws ValidationError for a kind missing
/// from the table, zero categories, or overflow.
Usd total_cost(const CostTable& table, SourceKind kind, std::uint64_t shots,
               std::uint64_t n_categories);

/// shot_points must be strictly increasing.
std::vector<std::pair<std::uint64_t, Usd>> cost_curve(const CostTable& table, SourceKind kind,
                                                      const std::vector<std::uint64_t>& shot_points,
                                                      std::uint64_t n_categories);

}  // namespace genbench
