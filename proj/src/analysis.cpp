#include "genbench/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace genbench {

namespace {

using json = nlohmann::json;

double mean_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

std::string fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  std::string out = buffer;
  if (out == "-0.000000") out.erase(0, 1);
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180 with either LF or CRLF line ends. Quoted fields may span lines.
std::vector<CsvRow> read_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  row.line = line;
  bool quoted = false;
  bool after_quote = false;
  bool any = false;  // current row has content
  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    after_quote = false;
  };
  auto end_row = [&] {
    if (any) {
      end_field();
      rows.push_back(std::move(row));
    }
    row = CsvRow{};
    row.line = line;
    field.clear();
    any = false;
    after_quote = false;
  };
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '\r' && in.peek() == '\n') continue;
    if (c == '\n') {
      ++line;
      end_row();
      continue;
    }
    any = true;
    if (c == ',') {
      end_field();
    } else if (c == '"') {
      if (!field.empty() || after_quote) throw ParseError("stray quote inside field", line);
      quoted = true;
    } else {
      if (after_quote) throw ParseError("text after closing quote", line);
      field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", row.line);
  end_row();
  return rows;
}

double parse_double(const std::string& text, std::size_t line, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("bad " + std::string(what) + " '" + text + "'", line);
  }
  return value;
}

std::int64_t parse_int(const std::string& text, std::size_t line) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("bad shots '" + text + "'", line);
  }
  return value;
}

std::pair<std::string, std::string> row_key(const EvalRecord& r) { return {r.model, r.strategy}; }

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("pearson_r: sequences differ in length (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) throw ValidationError("pearson_r needs at least 3 pairs");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ValidationError("pearson_r: non-finite input");
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("pearson_r: constant input sequence");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("spearman_r: sequences differ in length");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson_r(rx, ry);
}

void check_record(const EvalRecord& record) {
  if (!std::isfinite(record.value)) {
    throw ValidationError("record " + record.dataset + "/" + record.model + "/" + record.strategy +
                          " has a non-finite value");
  }
  if (record.baseline && !std::isfinite(*record.baseline)) {
    throw ValidationError("record " + record.dataset + " has a non-finite baseline");
  }
  if (record.shots < 0) throw ValidationError("record " + record.dataset + " has negative shots");
  if (record.dataset.empty() || record.model.empty() || record.strategy.empty()) {
    throw ValidationError("record is missing dataset, model or strategy");
  }
}

std::string_view to_string(Marker marker) noexcept {
  switch (marker) {
    case Marker::none: return "none";
    case Marker::best: return "best";
    case Marker::second_best: return "second_best";
  }
  return "unknown";
}

EvalReport aggregate_report(std::vector<EvalRecord> records) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<std::string> datasets;
  std::map<std::pair<std::string, std::string>, std::size_t> row_index;
  std::map<std::string, std::size_t, std::less<>> column_index;
  std::map<std::pair<std::size_t, std::size_t>, double> cells;

  for (const auto& record : records) {
    check_record(record);
    if (record.metric != records.front().metric) {
      throw ValidationError("report mixes metrics '" + records.front().metric + "' and '" + record.metric +
                            "'; aggregate one metric at a time");
    }
    const auto key = row_key(record);
    auto [rit, new_row] = row_index.try_emplace(key, rows.size());
    if (new_row) rows.push_back(key);
    auto [cit, new_col] = column_index.try_emplace(record.dataset, datasets.size());
    if (new_col) datasets.push_back(record.dataset);
    if (!cells.emplace(std::pair{rit->second, cit->second}, record.value).second) {
      throw ValidationError("duplicate cell " + record.model + "/" + record.strategy + " on " +
                            record.dataset);
    }
  }

  std::vector<std::string> missing;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < datasets.size(); ++c) {
      if (!cells.contains({r, c})) missing.push_back(rows[r].first + "/" + rows[r].second + " on " + datasets[c]);
    }
  }
  if (!missing.empty()) {
    std::string message = "ragged report, missing cells:";
    for (const auto& cell : missing) message += " [" + cell + "]";
    throw ValidationError(message);
  }

  EvalReport report;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < datasets.size(); ++c) sum += cells.at({r, c});
    report.row_means.push_back({rows[r].first, rows[r].second, sum / static_cast<double>(datasets.size())});
  }

  std::vector<Marker> marks(rows.size() * datasets.size(), Marker::none);
  for (std::size_t c = 0; c < datasets.size(); ++c) {
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
      return cells.at({a, c}) > cells.at({b, c});
    });
    if (!order.empty()) marks[order[0] * datasets.size() + c] = Marker::best;
    if (order.size() > 1) marks[order[1] * datasets.size() + c] = Marker::second_best;
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < datasets.size(); ++c) {
      report.markers.push_back({datasets[c], rows[r].first, rows[r].second, marks[r * datasets.size() + c]});
    }
  }
  report.records = std::move(records);
  return report;
}

std::vector<ScalingPoint> scaling_series(const std::vector<EvalRecord>& records,
                                         const std::map<std::string, DatasetInfo, std::less<>>& datasets,
                                         ConceptGroup group, const CostTable& costs, SourceKind kind) {
  // shots -> dataset -> values
  std::vector<std::int64_t> shot_order;
  std::map<std::int64_t, std::map<std::string, std::vector<double>>> points;
  for (const auto& record : records) {
    check_record(record);
    const auto it = datasets.find(record.dataset);
    if (it == datasets.end()) {
      throw ValidationError("no dataset info for '" + record.dataset + "'");
    }
    if (it->second.group != group) continue;
    auto [pit, inserted] = points.try_emplace(record.shots);
    if (inserted) shot_order.push_back(record.shots);
    pit->second[record.dataset].push_back(record.value);
  }
  if (shot_order.empty()) {
    throw ValidationError("no records for concept group '" + std::string(to_string(group)) + "'");
  }

  std::vector<ScalingPoint> series;
  for (auto shots : shot_order) {
    const auto& per_dataset = points.at(shots);
    double value_sum = 0.0;
    std::int64_t cost_nano = 0;
    for (const auto& [name, values] : per_dataset) {
      value_sum += mean_of(values);
      const auto cost = total_cost(costs, kind, static_cast<std::uint64_t>(shots), datasets.find(name)->second.n_categories);
      if (__builtin_add_overflow(cost_nano, cost.nano(), &cost_nano)) throw ValidationError("cost overflow");
    }
    const auto count = static_cast<double>(per_dataset.size());
    const double total = Usd::from_nano(cost_nano).dollars();
    series.push_back({shots, value_sum / count, total / count, total});
  }
  return series;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ValidationError("unknown report format '" + std::string(name) + "'");
}

std::string emit_records_csv(std::span<const EvalRecord> records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += csv_field(r.dataset) + ',' + csv_field(r.model) + ',' + csv_field(r.strategy) + ',' +
           std::to_string(r.shots) + ',' + csv_field(r.metric) + ',' + fixed6(r.value) + ',';
    if (r.baseline) out += fixed6(*r.baseline) + ',' + fixed6(r.value - *r.baseline);
    else out += ',';
    out += '\n';
  }
  return out;
}

std::string emit(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::csv) return emit_records_csv(report.records);

  json records = json::array();
  for (const auto& r : report.records) {
    json item{{"dataset", r.dataset}, {"model", r.model},   {"strategy", r.strategy},
              {"shots", r.shots},     {"metric", r.metric}, {"value", r.value},
              {"baseline", nullptr},  {"delta", nullptr}};
    if (r.baseline) {
      item["baseline"] = *r.baseline;
      item["delta"] = r.value - *r.baseline;
    }
    records.push_back(std::move(item));
  }
  json means = json::array();
  for (const auto& m : report.row_means) {
    means.push_back({{"model", m.model}, {"strategy", m.strategy}, {"mean", m.mean}});
  }
  json markers = json::array();
  for (const auto& m : report.markers) {
    markers.push_back({{"dataset", m.dataset}, {"model", m.model}, {"strategy", m.strategy},
                       {"marker", to_string(m.marker)}});
  }
  json doc{{"records", std::move(records)}, {"row_means", std::move(means)}, {"best_markers", std::move(markers)}};
  return doc.dump(2) + "\n";
}

std::vector<EvalRecord> parse_records_csv(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty()) throw ParseError("missing CSV header", 1);
  std::string header;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    if (i) header += ',';
    header += rows[0].fields[i];
  }
  if (header != kCsvHeader) throw ParseError("unexpected CSV header '" + header + "'", rows[0].line);

  std::vector<EvalRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i].fields;
    const auto line = rows[i].line;
    if (f.size() != 8) {
      throw ParseError("expected 8 fields, found " + std::to_string(f.size()), line);
    }
    EvalRecord r;
    r.dataset = f[0];
    r.model = f[1];
    r.strategy = f[2];
    r.shots = parse_int(f[3], line);
    r.metric = f[4];
    r.value = parse_double(f[5], line, "value");
    if (!f[6].empty()) r.baseline = parse_double(f[6], line, "baseline");
    if (f[6].empty() && !f[7].empty()) throw ParseError("delta given without baseline", line);
    try {
      check_record(r);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EvalRecord> load_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open records file '" + path.string() + "'");
  return parse_records_csv(in);
}

TimingStats summarize_timings(std::vector<double> seconds) {
  TimingStats stats;
  stats.seconds = std::move(seconds);
  if (stats.seconds.empty()) return stats;
  stats.mean = mean_of(stats.seconds);
  if (stats.seconds.size() > 1) {
    double ss = 0.0;
    for (double s : stats.seconds) ss += (s - stats.mean) * (s - stats.mean);
    const auto n = static_cast<double>(stats.seconds.size());
    stats.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return stats;
}

}  // namespace genbench
