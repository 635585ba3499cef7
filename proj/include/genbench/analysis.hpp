#pragma once

// Correlation statistics, report aggregation, scaling series and report
// emission (CSV / JSON).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "genbench/costmodel.hpp"
#include "genbench/manifest.hpp"

namespace genbench {

/// Sample Pearson correlation. Needs >= 3 equal-length values and neither
/// side constant (DegenerateInputError).
double pearson_r(std::span<const double> x, std::span<const double> y);
/// Pearson over average ranks.
double spearman_r(std::span<const double> x, std::span<const double> y);
/// 1-based ranks, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct EvalRecord {
  std::string dataset;
  std::string model;
  std::string strategy;
  std::int64_t shots = 0;
  std::string metric;
  double value = 0.0;
  std::optional<double> baseline;

  bool operator==(const EvalRecord&) const = default;
};

void check_record(const EvalRecord& record);

enum class Marker { none, best, second_best };
std::string_view to_string(Marker marker) noexcept;

struct RowMean {
  std::string model;
  std::string strategy;
  double mean = 0.0;
};

struct CellMarker {
  std::string dataset;
  std::string model;
  std::string strategy;
  Marker marker = Marker::none;
};

struct EvalReport {
  std::vector<EvalRecord> records;
  std::vector<RowMean> row_means;     // rows in first-appearance order
  std::vector<CellMarker> markers;    // one per cell, row-major
};

/// Rows are (model, strategy), columns are datasets. Records must share one
/// metric and every row must cover the same datasets exactly once. Per column
/// the highest value is best and the next is second best; equal values go to
/// the row listed first.
EvalReport aggregate_report(std::vector<EvalRecord> records);

struct DatasetInfo {
  ConceptGroup group = ConceptGroup::common;
  std::uint64_t n_categories = 0;
};

struct ScalingPoint {
  std::int64_t shots = 0;
  double mean_value = 0.0;
  double mean_cost = 0.0;   // USD per dataset at this point
  double total_cost = 0.0;  // USD summed over the group's datasets
};

/// Per shot point (first-appearance order) the unweighted mean over the
/// group's datasets, with the acquisition cost for `kind`.
std::vector<ScalingPoint> scaling_series(const std::vector<EvalRecord>& records,
                                         const std::map<std::string, DatasetInfo, std::less<>>& datasets,
                                         ConceptGroup group, const CostTable& costs, SourceKind kind);

enum class ReportFormat { csv, json };
ReportFormat parse_report_format(std::string_view name);

inline constexpr std::string_view kCsvHeader = "dataset,model,strategy,shots,metric,value,baseline,delta";

/// Numbers are fixed at 6 decimals in CSV. Output is byte-deterministic.
std::string emit(const EvalReport& report, ReportFormat format);
std::string emit_records_csv(std::span<const EvalRecord> records);

/// Reads the CSV written by emit. Blank trailing lines are ignored;
/// malformed rows raise ParseError with the line number.
std::vector<EvalRecord> parse_records_csv(std::istream& in);
std::vector<EvalRecord> load_records_csv(const std::filesystem::path& path);

struct TimingStats {
  std::vector<double> seconds;
  double mean = 0.0;
  double standard_error = 0.0;
};

TimingStats summarize_timings(std::vector<double> seconds);

/// One untimed warm-up call, then `runs` timed calls.
template <typename Fn>
TimingStats time_runs(Fn&& fn, int runs = 3) {
  fn();
  std::vector<double> seconds;
  for (int i = 0; i < runs; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return summarize_timings(std::move(seconds));
}

}  // namespace genbench
