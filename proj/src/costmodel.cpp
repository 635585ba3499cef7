#include "genbench/costmodel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace genbench {

namespace {

using json = nlohmann::json;

std::int64_t checked_mul(std::int64_t a, std::uint64_t b) {
  if (b > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw ValidationError("cost overflow");
  }
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, static_cast<std::int64_t>(b), &out)) {
    throw ValidationError("cost overflow");
  }
  return out;
}

}  // namespace

Usd Usd::from_dollars(double dollars) {
  const double nano = std::round(dollars * 1e9);
  if (!std::isfinite(nano) || std::abs(nano) >= 9.2e18) {
    throw ValidationError("amount out of range");
  }
  return Usd(static_cast<std::int64_t>(nano));
}

std::string Usd::to_string() const {
  // half away from zero at the cent
  const std::int64_t magnitude = nano_ < 0 ? -nano_ : nano_;
  const std::int64_t cents = (magnitude + 5'000'000) / 10'000'000;
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%s%lld.%02lld", nano_ < 0 && cents != 0 ? "-" : "",
                static_cast<long long>(cents / 100), static_cast<long long>(cents % 100));
  return buffer;
}

CostTable::CostTable(std::map<SourceKind, Usd> per_image) : per_image_(std::move(per_image)) {
  for (const auto& [kind, rate] : per_image_) {
    if (rate.nano() <= 0) {
      throw ValidationError("cost rate for '" + std::string(genbench::to_string(kind)) +
                            "' must be positive");
    }
  }
}

Usd CostTable::rate(SourceKind kind) const {
  const auto it = per_image_.find(kind);
  if (it == per_image_.end()) {
    throw ValidationError("cost table has no rate for '" + std::string(genbench::to_string(kind)) + "'");
  }
  return it->second;
}

CostTable default_cost_table() {
  return CostTable({{SourceKind::generative, Usd::from_nano(254'000)},
                    {SourceKind::retrieval, Usd::from_nano(39'300)},
                    {SourceKind::original, Usd::from_nano(12'000'000)}});
}

CostTable parse_cost_table(const json& doc) {
  if (!doc.is_object() || doc.empty()) throw ValidationError("cost table must be a non-empty JSON object");
  std::map<SourceKind, Usd> rates;
  for (const auto& item : doc.items()) {
    const auto kind = parse_source_kind(item.key());
    if (kind == SourceKind::test || kind == SourceKind::text) {
      throw ValidationError("cost table cannot price '" + item.key() + "' data");
    }
    if (!item.value().is_number()) throw ValidationError("cost rate for '" + item.key() + "' is not a number");
    rates.emplace(kind, Usd::from_dollars(item.value().get<double>()));
  }
  return CostTable(std::move(rates));
}

CostTable load_cost_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cost table '" + path.string() + "'");
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("cost table '" + path.string() + "' is not valid JSON");
  return parse_cost_table(doc);
}

Usd total_cost(const CostTable& table, SourceKind kind, std::uint64_t shots,
               std::uint64_t n_categories) {
  if (n_categories == 0) throw ValidationError("category count must be positive");
  const auto rate = table.rate(kind);
  return Usd::from_nano(checked_mul(checked_mul(rate.nano(), shots), n_categories));
}

std::vector<std::pair<std::uint64_t, Usd>> cost_curve(const CostTable& table, SourceKind kind,
                                                      const std::vector<std::uint64_t>& shot_points,
                                                      std::uint64_t n_categories) {
  std::vector<std::pair<std::uint64_t, Usd>> curve;
  curve.reserve(shot_points.size());
  for (std::size_t i = 0; i < shot_points.size(); ++i) {
    if (i > 0 && shot_points[i] <= shot_points[i - 1]) {
      throw ValidationError("shot points must be strictly increasing");
    }
    curve.emplace_back(shot_points[i], total_cost(table, kind, shot_points[i], n_categories));
  }
  return curve;
}

}  // namespace genbench
