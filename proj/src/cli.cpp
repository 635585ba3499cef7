#include "genbench/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "genbench/analysis.hpp"
#include "genbench/cler.hpp"
#include "genbench/costmodel.hpp"
#include "genbench/distmetrics.hpp"
#include "genbench/embedstore.hpp"
#include "genbench/manifest.hpp"
#include "genbench/probe.hpp"
#include "genbench/promptgen.hpp"
#include "genbench/retrieval.hpp"

namespace genbench::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "text";
  unsigned threads = 1;
};

// Tags written into csv/json records.
struct RecordTags {
  std::string model = "external";
  std::string strategy = "none";
};

struct Metric {
  std::string name;
  double value = 0.0;
  std::optional<double> baseline;
};

struct DatasetResult {
  std::string label;
  std::int64_t shots = 0;
  std::vector<Metric> metrics;
  std::vector<std::string> warnings;
};

std::string fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", value);
  return buffer;
}

EmbeddingSet load_unit(const fs::path& path) {
  auto set = load_embedding_set(path);
  if (set.normalized) return set;
  return l2_normalize(std::move(set));
}

TextEmbeddings load_text(const fs::path& path) { return text_embeddings_from_set(load_unit(path)); }

RetrievalIndex load_index(const fs::path& corpus, const fs::path& ids) {
  return RetrievalIndex(load_unit(corpus), read_id_list(ids));
}

std::int64_t min_shots(const EmbeddingSet& set) {
  std::vector<std::int64_t> counts(set.num_classes(), 0);
  for (auto label : set.labels) {
    if (label >= 0) ++counts[static_cast<std::size_t>(label)];
  }
  return counts.empty() ? 0 : *std::ranges::min_element(counts);
}

void require_manifest_match(const DatasetManifest& manifest, const EmbeddingSet& set,
                            const std::string& what) {
  const auto report = validate_manifest(manifest, set);
  if (report.ok()) return;
  std::string message = what + " does not match manifest '" + manifest.name + "':";
  for (const auto& issue : report.issues) message += "\n  " + issue.message;
  throw ValidationError(message);
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Results and the
// first failure are reported in input order.
template <typename Fn>
std::vector<DatasetResult> fan_out(std::size_t count, unsigned threads, Fn fn) {
  std::vector<DatasetResult> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return results;
}

std::string render_results(const std::vector<DatasetResult>& results, const Globals& globals,
                           const RecordTags& tags) {
  if (globals.format == "text") {
    std::string out;
    for (const auto& result : results) {
      for (const auto& metric : result.metrics) {
        if (results.size() > 1) out += result.label + '\t';
        out += metric.name + '\t' + fixed6(metric.value) + '\n';
      }
    }
    return out;
  }
  EvalReport report;
  for (const auto& result : results) {
    for (const auto& metric : result.metrics) {
      report.records.push_back(
          {result.label, tags.model, tags.strategy, result.shots, metric.name, metric.value, metric.baseline});
    }
  }
  return emit(report, parse_report_format(globals.format));
}

void write_output(const std::string& text, const Globals& globals, std::ostream& out) {
  if (globals.out.empty()) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(globals.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + globals.out + "' for writing");
  file << text;
  file.close();
  if (!file) throw IoError("error while writing '" + globals.out + "'");
}

std::string dataset_label(const std::vector<DatasetManifest>& manifests, std::size_t i,
                          const std::string& test_path) {
  if (!manifests.empty()) return manifests[i].name;
  return fs::path(test_path).stem().string();
}

std::vector<DatasetManifest> load_manifests(const std::vector<std::string>& paths, std::size_t expected) {
  std::vector<DatasetManifest> manifests;
  if (paths.empty()) return manifests;
  if (paths.size() != expected) {
    throw ValidationError("got " + std::to_string(paths.size()) + " --manifest values for " +
                          std::to_string(expected) + " datasets");
  }
  for (const auto& path : paths) manifests.push_back(load_manifest(path));
  return manifests;
}

void require_paired(std::size_t a, std::size_t b, const char* left, const char* right) {
  if (a != b) {
    throw ValidationError(std::string("--") + left + " and --" + right + " must be given the same number of times (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// ---------------------------------------------------------------- cler

struct ClerArgs {
  std::vector<std::string> external, test, text, manifests;
  bool ensemble = false;
  RecordTags tags;
};

std::string run_cler(const ClerArgs& a, const Globals& g) {
  require_paired(a.external.size(), a.test.size(), "external", "test");
  if (!a.text.empty()) require_paired(a.text.size(), a.test.size(), "text", "test");
  if (a.ensemble && a.text.empty()) throw ValidationError("--ensemble needs --text");
  const auto manifests = load_manifests(a.manifests, a.test.size());

  auto results = fan_out(a.test.size(), g.threads, [&](std::size_t i) {
    const auto external = load_unit(a.external[i]);
    const auto test = load_unit(a.test[i]);
    if (!manifests.empty()) {
      require_manifest_match(manifests[i], external, "external data");
      require_manifest_match(manifests[i], test, "test data");
    }
    DatasetResult result;
    result.label = dataset_label(manifests, i, a.test[i]);
    const auto centers = class_centers(external);
    result.shots = static_cast<std::int64_t>(*std::ranges::min_element(centers.shots_per_class));
    const double score = cler_score(centers, test);
    if (a.text.empty()) {
      result.metrics.push_back({"cler", score, std::nullopt});
      return result;
    }
    const auto text = load_text(a.text[i]);
    const double zero_shot = zero_shot_score(text, test);
    result.metrics.push_back({"cler", score, zero_shot});
    result.metrics.push_back({"zero_shot", zero_shot, std::nullopt});
    if (g.format == "text") result.metrics.push_back({"delta", cler_delta(score, zero_shot), std::nullopt});
    if (a.ensemble) result.metrics.push_back({"ensemble", cler_ensemble(centers, text, test), zero_shot});
    return result;
  });
  return render_results(results, g, a.tags);
}

// ---------------------------------------------------------------- probe

struct ProbeArgs {
  std::vector<std::string> train, test, manifests;
  std::string metric;
  std::string save_model;
  ProbeOptions options;
  RecordTags tags;
};

std::string run_probe(const ProbeArgs& a, const Globals& g, std::ostream& err) {
  require_paired(a.train.size(), a.test.size(), "train", "test");
  if (!a.save_model.empty() && a.train.size() != 1) {
    throw ValidationError("--save-model needs exactly one dataset");
  }
  const auto manifests = load_manifests(a.manifests, a.test.size());
  std::optional<MetricKind> forced;
  if (!a.metric.empty()) forced = parse_metric_kind(a.metric);

  auto results = fan_out(a.test.size(), g.threads, [&](std::size_t i) {
    const auto train = load_unit(a.train[i]);
    const auto test = load_unit(a.test[i]);
    if (!manifests.empty()) {
      require_manifest_match(manifests[i], train, "training data");
      require_manifest_match(manifests[i], test, "test data");
    }
    if (train.class_names != test.class_names) {
      throw ValidationError("training and test sets list different classes");
    }
    require_labeled(test, "test data");
    const auto kind = forced ? *forced : manifests.empty() ? MetricKind::accuracy : manifests[i].metric_kind;

    const auto model = train_linear_probe(train, a.options);
    if (!a.save_model.empty()) save_probe_model(model, a.save_model);
    const auto preds = probe_scores(model, test);
    auto metric = evaluate_metric(preds, test.labels, kind);

    DatasetResult result;
    result.label = dataset_label(manifests, i, a.test[i]);
    result.shots = min_shots(train);
    result.warnings = std::move(metric.warnings);
    if (!model.converged) {
      result.warnings.push_back("probe stopped after " + std::to_string(model.trace.back().iteration) +
                                " iterations without meeting the gradient tolerance");
    }
    result.metrics.push_back({"probe_" + std::string(to_string(kind)), metric.value, std::nullopt});
    if (g.format == "text") result.metrics.push_back({"train_loss", model.trace.back().loss, std::nullopt});
    return result;
  });
  for (const auto& result : results) {
    for (const auto& warning : result.warnings) err << "warning: " << result.label << ": " << warning << '\n';
  }
  return render_results(results, g, a.tags);
}

// ---------------------------------------------------------------- fid / clipscore

std::string run_fid(const std::string& a, const std::string& b, const Globals& g, const RecordTags& tags) {
  const auto first = load_unit(a);
  const auto second = load_unit(b);
  DatasetResult result{fs::path(b).stem().string(), min_shots(first), {}, {}};
  result.metrics.push_back({"fid", frechet_distance(gaussian_stats(first), gaussian_stats(second)), std::nullopt});
  return render_results({result}, g, tags);
}

std::string run_clipscore(const std::string& images, const std::string& text, const Globals& g,
                          const RecordTags& tags) {
  const auto set = load_unit(images);
  const auto prototypes = load_text(text);
  DatasetResult result{fs::path(images).stem().string(), min_shots(set), {}, {}};
  result.metrics.push_back({"clip_score", clip_score(set, prototypes), std::nullopt});
  return render_results({result}, g, tags);
}

// ---------------------------------------------------------------- retrieval

struct RetrievalArgs {
  std::string corpus, ids, queries;
  std::vector<std::string> categories;
  std::size_t k = kDefaultRetrievalK;
  std::size_t n = 0;
  RecordTags tags;
};

std::vector<std::size_t> query_rows(const TextEmbeddings& queries, const std::vector<std::string>& wanted) {
  std::vector<std::size_t> rows;
  if (wanted.empty()) {
    for (std::size_t i = 0; i < queries.num_classes(); ++i) rows.push_back(i);
    return rows;
  }
  for (const auto& name : wanted) {
    const auto it = std::ranges::find(queries.class_names, name);
    if (it == queries.class_names.end()) throw ValidationError("no query embedding for category '" + name + "'");
    rows.push_back(static_cast<std::size_t>(it - queries.class_names.begin()));
  }
  return rows;
}

std::string run_mts(const RetrievalArgs& a, const Globals& g) {
  const auto index = load_index(a.corpus, a.ids);
  const auto queries = load_text(a.queries);
  DatasetResult result{fs::path(a.queries).stem().string(), static_cast<std::int64_t>(a.k), {}, {}};
  std::vector<double> per_category;
  for (auto row : query_rows(queries, a.categories)) {
    const double mts = category_mts(index, queries.vectors.row(row), a.k);
    per_category.push_back(mts);
    result.metrics.push_back({"mts:" + queries.class_names[row], mts, std::nullopt});
  }
  result.metrics.push_back({"dataset_mts", dataset_mts(per_category), std::nullopt});
  if (g.format == "text") {
    std::string out;
    for (const auto& metric : result.metrics) {
      const auto name = metric.name.starts_with("mts:") ? metric.name.substr(4) : metric.name;
      out += name + '\t' + fixed6(metric.value) + '\n';
    }
    return out;
  }
  return render_results({result}, g, a.tags);
}

std::string run_retrieve(const RetrievalArgs& a, const Globals& g) {
  const auto index = load_index(a.corpus, a.ids);
  const auto queries = load_text(a.queries);
  const std::size_t n = a.n == 0 ? a.k : a.n;
  json rows = json::array();
  std::string text = g.format == "csv" ? "category,rank,id,similarity\n" : "";
  for (auto row : query_rows(queries, a.categories)) {
    const auto& category = queries.class_names[row];
    const auto hits = topk(index, queries.vectors.row(row), a.k);
    select_retrieval_shots(hits, n);  // InsufficientHitsError when n > hits
    for (std::size_t i = 0; i < n; ++i) {
      const auto& hit = hits[i];
      if (g.format == "json") {
        rows.push_back({{"category", category}, {"rank", hit.rank}, {"id", hit.id}, {"similarity", hit.similarity}});
      } else {
        const char sep = g.format == "csv" ? ',' : '\t';
        std::string cat = category;
        std::string id = hit.id;
        if (g.format == "csv") {
          auto quote = [](const std::string& s) {
            if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            return q + "\"";
          };
          cat = quote(cat);
          id = quote(id);
        }
        text += cat + sep + std::to_string(hit.rank) + sep + id + sep + fixed6(hit.similarity) + '\n';
      }
    }
  }
  return g.format == "json" ? rows.dump(2) + "\n" : text;
}

// ---------------------------------------------------------------- prompts

struct PromptArgs {
  std::string manifest;
  std::vector<std::string> categories;
  std::string strategy = "st";
  std::size_t n = 1;
  std::string ce;
  bool raw_name = false;
  std::size_t max_siblings = kDefaultNegativeSiblings;
};

std::string run_prompts(const PromptArgs& a, const Globals& g) {
  const auto manifest = load_manifest(a.manifest);
  auto strategy = PromptStrategy::parse(a.strategy);
  strategy.raw_name = a.raw_name;
  if (a.max_siblings == 0) throw ValidationError("--max-siblings must be positive");
  strategy.max_negative_siblings = a.max_siblings;
  std::optional<CeSentences> ce;
  if (!a.ce.empty()) ce = load_ce_sentences(a.ce);
  if (strategy.base == PromptBase::category_enhancement && !ce) {
    throw MissingResourceError("strategy '" + a.strategy + "' needs --ce <sentences.tsv>");
  }
  const auto& categories = a.categories.empty() ? manifest.categories : a.categories;
  std::string out;
  for (const auto& category : categories) {
    for (const auto& record : render_prompts(manifest, category, strategy, a.n, g.seed, ce ? &*ce : nullptr)) {
      out += to_json_line(record);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------- cost

struct CostArgs {
  std::string kind;
  std::vector<std::uint64_t> shots;
  std::uint64_t categories = 0;
  std::string group;
  std::string manifests_dir;
  std::string table;
};

std::uint64_t group_category_count(const std::string& dir, ConceptGroup group) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  }
  std::ranges::sort(paths);
  std::uint64_t total = 0;
  for (const auto& path : paths) {
    const auto manifest = load_manifest(path);
    if (manifest.concept_group == group) total += manifest.categories.size();
  }
  if (total == 0) throw ValidationError("no manifests in '" + dir + "' belong to that concept group");
  return total;
}

std::string run_cost(const CostArgs& a, const Globals& g) {
  const auto table = a.table.empty() ? default_cost_table() : load_cost_table(a.table);
  const auto kind = parse_source_kind(a.kind);
  std::uint64_t categories = a.categories;
  if (!a.group.empty()) {
    if (categories != 0) throw ValidationError("give either --categories or --group, not both");
    if (a.manifests_dir.empty()) throw ValidationError("--group needs --manifests <dir>");
    categories = group_category_count(a.manifests_dir, parse_concept_group(a.group));
  }
  if (categories == 0) throw ValidationError("need --categories or --group");
  const auto curve = cost_curve(table, kind, a.shots, categories);

  if (g.format == "json") {
    json rows = json::array();
    for (const auto& [shots, usd] : curve) rows.push_back({{"shots", shots}, {"usd", usd.dollars()}});
    return rows.dump(2) + "\n";
  }
  std::string out = g.format == "csv" ? "shots,usd\n" : "";
  if (g.format == "text" && curve.size() == 1) return curve[0].second.to_string() + "\n";
  for (const auto& [shots, usd] : curve) {
    out += std::to_string(shots) + (g.format == "csv" ? "," : "\t") + usd.to_string() + '\n';
  }
  return out;
}

// ---------------------------------------------------------------- report / correlate

std::vector<EvalRecord> load_all_records(const std::vector<std::string>& paths) {
  std::vector<EvalRecord> records;
  for (const auto& path : paths) {
    auto more = load_records_csv(path);
    records.insert(records.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  return records;
}

std::string run_report(const std::vector<std::string>& paths, const std::string& only_metric,
                       const Globals& g) {
  auto records = load_all_records(paths);
  // one table per metric, in first-appearance order
  std::vector<std::string> metrics;
  std::map<std::string, std::vector<EvalRecord>> by_metric;
  for (auto& record : records) {
    if (!only_metric.empty() && record.metric != only_metric) continue;
    auto [it, inserted] = by_metric.try_emplace(record.metric);
    if (inserted) metrics.push_back(record.metric);
    it->second.push_back(std::move(record));
  }
  if (metrics.empty()) throw ValidationError("no records to report");

  std::string out;
  json reports = json::array();
  for (const auto& metric : metrics) {
    const auto report = aggregate_report(std::move(by_metric[metric]));
    if (g.format == "text") {
      for (const auto& row : report.row_means) {
        out += metric + '\t' + row.model + '\t' + row.strategy + '\t' + fixed6(row.mean) + '\n';
      }
    } else if (g.format == "csv") {
      auto csv = emit(report, ReportFormat::csv);
      if (!out.empty()) csv.erase(0, csv.find('\n') + 1);  // header once
      out += csv;
    } else {
      auto doc = json::parse(emit(report, ReportFormat::json));
      doc["metric"] = metric;
      reports.push_back(std::move(doc));
    }
  }
  return g.format == "json" ? reports.dump(2) + "\n" : out;
}

struct CorrelateArgs {
  std::vector<std::string> records;
  std::string x, y;
  std::string method = "pearson";
};

std::string run_correlate(const CorrelateArgs& a, const Globals& g) {
  using Key = std::tuple<std::string, std::string, std::string, std::int64_t>;
  std::map<Key, double> xs;
  std::map<Key, double> ys;
  std::vector<Key> order;
  for (const auto& r : load_all_records(a.records)) {
    const Key key{r.dataset, r.model, r.strategy, r.shots};
    auto* target = r.metric == a.x ? &xs : r.metric == a.y ? &ys : nullptr;
    if (target == nullptr) continue;
    if (!target->emplace(key, r.value).second) {
      throw ValidationError("duplicate '" + r.metric + "' record for " + r.dataset + "/" + r.model + "/" +
                            r.strategy + "/" + std::to_string(r.shots));
    }
    if (r.metric == a.x) order.push_back(key);
  }
  std::vector<double> x, y;
  for (const auto& key : order) {
    const auto it = ys.find(key);
    if (it == ys.end()) continue;
    x.push_back(xs.at(key));
    y.push_back(it->second);
  }
  double r = 0.0;
  if (a.method == "pearson") r = pearson_r(x, y);
  else if (a.method == "spearman") r = spearman_r(x, y);
  else throw ValidationError("unknown correlation method '" + a.method + "'");

  if (g.format == "json") {
    return json{{"method", a.method}, {"x", a.x}, {"y", a.y}, {"n", x.size()}, {"r", r}}.dump(2) + "\n";
  }
  if (g.format == "csv") {
    return "method,x,y,n,r\n" + a.method + ',' + a.x + ',' + a.y + ',' + std::to_string(x.size()) + ',' +
           fixed6(r) + '\n';
  }
  return a.method + '\t' + fixed6(r) + "\nn\t" + std::to_string(x.size()) + '\n';
}

// ---------------------------------------------------------------- timings

struct TimingArgs {
  std::string external, test, text;
  int runs = 3;
  bool probe = false;
};

std::string run_timings(const TimingArgs& a, const Globals& g) {
  if (a.runs < 1) throw ValidationError("--runs must be at least 1");
  const auto external = load_unit(a.external);
  const auto test = load_unit(a.test);
  std::optional<TextEmbeddings> text;
  if (!a.text.empty()) text = load_text(a.text);

  std::vector<std::pair<std::string, TimingStats>> rows;
  rows.emplace_back("cler", time_runs([&] { return cler_score(class_centers(external), test); }, a.runs));
  rows.emplace_back("fid", time_runs([&] {
    return frechet_distance(gaussian_stats(external), gaussian_stats(test));
  }, a.runs));
  if (text) {
    rows.emplace_back("zero_shot", time_runs([&] { return zero_shot_score(*text, test); }, a.runs));
    rows.emplace_back("clip_score", time_runs([&] { return clip_score(external, *text); }, a.runs));
  }
  if (a.probe) {
    rows.emplace_back("probe", time_runs([&] {
      return evaluate_metric(probe_scores(train_linear_probe(external), test), test.labels, MetricKind::accuracy);
    }, a.runs));
  }

  if (g.format == "json") {
    json out = json::array();
    for (const auto& [name, stats] : rows) {
      out.push_back({{"metric", name}, {"mean_seconds", stats.mean}, {"stderr_seconds", stats.standard_error},
                     {"runs", stats.seconds}});
    }
    return out.dump(2) + "\n";
  }
  std::string out = g.format == "csv" ? "metric,mean_seconds,stderr_seconds\n" : "";
  const char sep = g.format == "csv" ? ',' : '\t';
  for (const auto& [name, stats] : rows) {
    out += name + sep + fixed6(stats.mean) + sep + fixed6(stats.standard_error) + '\n';
  }
  return out;
}

void add_tags(CLI::App* sub, RecordTags& tags) {
  sub->add_option("--model", tags.model, "Model tag for csv/json records")->capture_default_str();
  sub->add_option("--strategy", tags.strategy, "Strategy tag for csv/json records")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Embedding-space evaluation of external training data", "genbench"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every sampled choice")->capture_default_str();
  app.add_option("--out", g.out, "Write results here instead of stdout");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads across datasets")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  const auto existing = CLI::ExistingFile;

  ClerArgs cler;
  auto* cler_cmd = app.add_subcommand("cler", "CLER score of external data against a test set");
  cler_cmd->add_option("--external", cler.external, "External (training) embeddings; repeat per dataset")
      ->required()->check(existing);
  cler_cmd->add_option("--test", cler.test, "Test embeddings; repeat per dataset")->required()->check(existing);
  cler_cmd->add_option("--text", cler.text, "Per-class text embeddings for the zero-shot baseline")->check(existing);
  cler_cmd->add_option("--manifest", cler.manifests, "Dataset manifest; repeat per dataset")->check(existing);
  cler_cmd->add_flag("--ensemble", cler.ensemble, "Also score the center + text ensemble");
  add_tags(cler_cmd, cler.tags);

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "Train and evaluate a linear probe");
  probe_cmd->add_option("--train", probe.train, "Training embeddings; repeat per dataset")->required()->check(existing);
  probe_cmd->add_option("--test", probe.test, "Test embeddings; repeat per dataset")->required()->check(existing);
  probe_cmd->add_option("--manifest", probe.manifests, "Dataset manifest; repeat per dataset")->check(existing);
  probe_cmd->add_option("--metric", probe.metric, "accuracy, mean_per_class, roc_auc or map_11pt");
  probe_cmd->add_option("--lambda", probe.options.lambda, "L2 weight")->capture_default_str();
  probe_cmd->add_option("--max-iter", probe.options.max_iter, "Iteration cap")->capture_default_str();
  probe_cmd->add_option("--tol", probe.options.tol, "Gradient inf-norm tolerance")->capture_default_str();
  probe_cmd->add_option("--save-model", probe.save_model, "Write the trained probe as .gbe");
  add_tags(probe_cmd, probe.tags);

  std::string fid_a, fid_b;
  RecordTags fid_tags;
  auto* fid_cmd = app.add_subcommand("fid", "Frechet distance between two embedding sets");
  fid_cmd->add_option("--a", fid_a, "First embedding set")->required()->check(existing);
  fid_cmd->add_option("--b", fid_b, "Second embedding set")->required()->check(existing);
  add_tags(fid_cmd, fid_tags);

  std::string clip_images, clip_text;
  RecordTags clip_tags;
  auto* clip_cmd = app.add_subcommand("clipscore", "Mean cosine between images and their class text");
  clip_cmd->add_option("--images", clip_images, "Labeled image embeddings")->required()->check(existing);
  clip_cmd->add_option("--text", clip_text, "Per-class text embeddings")->required()->check(existing);
  add_tags(clip_cmd, clip_tags);

  RetrievalArgs mts;
  auto* mts_cmd = app.add_subcommand("mts", "Mean text similarity of top-k corpus hits");
  RetrievalArgs retrieve;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Top-k corpus hits per category");
  for (auto [cmd, ra] : {std::pair{mts_cmd, &mts}, std::pair{retrieve_cmd, &retrieve}}) {
    cmd->add_option("--corpus", ra->corpus, "Corpus embeddings")->required()->check(existing);
    cmd->add_option("--ids", ra->ids, "Corpus ids, one per line in row order")->required()->check(existing);
    cmd->add_option("--queries", ra->queries, "Per-category query embeddings")->required()->check(existing);
    cmd->add_option("--category", ra->categories, "Restrict to these categories");
    cmd->add_option("-k", ra->k, "Hits per query")->capture_default_str()->check(CLI::PositiveNumber);
  }
  add_tags(mts_cmd, mts.tags);
  retrieve_cmd->add_option("-n,--shots", retrieve.n, "Shots to select per category (default k)");

  PromptArgs prompts;
  auto* prompts_cmd = app.add_subcommand("prompts", "Compile generation prompts as JSON lines");
  prompts_cmd->add_option("--manifest", prompts.manifest, "Dataset manifest")->required()->check(existing);
  prompts_cmd->add_option("--category", prompts.categories, "Categories (default: all)");
  prompts_cmd->add_option("--strategy", prompts.strategy, "st, dt, ce, rd, np or a '+' combination")
      ->capture_default_str();
  prompts_cmd->add_option("-n", prompts.n, "Prompts per category")->capture_default_str()->check(CLI::PositiveNumber);
  prompts_cmd->add_option("--ce", prompts.ce, "Category sentences (category<TAB>sentence)")->check(existing);
  prompts_cmd->add_flag("--raw-name", prompts.raw_name, "ST emits the bare category name");
  prompts_cmd->add_option("--max-siblings", prompts.max_siblings, "Negative-prompt sibling cap")
      ->capture_default_str();

  CostArgs cost;
  auto* cost_cmd = app.add_subcommand("cost", "Acquisition cost in USD");
  cost_cmd->add_option("--kind", cost.kind, "generative, retrieval or original")->required();
  cost_cmd->add_option("--shots", cost.shots, "Images per category; several give a curve")->required();
  cost_cmd->add_option("--categories", cost.categories, "Number of categories");
  cost_cmd->add_option("--group", cost.group, "Sum categories of this concept group");
  cost_cmd->add_option("--manifests", cost.manifests_dir, "Manifest directory for --group")->check(CLI::ExistingDirectory);
  cost_cmd->add_option("--table", cost.table, "Cost table JSON override")->check(existing);

  std::vector<std::string> report_paths;
  std::string report_metric;
  auto* report_cmd = app.add_subcommand("report", "Aggregate record CSVs into row means and markers");
  report_cmd->add_option("--records", report_paths, "Record CSV files")->required()->check(existing);
  report_cmd->add_option("--metric", report_metric, "Only this metric");

  CorrelateArgs corr;
  auto* corr_cmd = app.add_subcommand("correlate", "Correlation between two metrics over matching records");
  corr_cmd->add_option("--records", corr.records, "Record CSV files")->required()->check(existing);
  corr_cmd->add_option("--x", corr.x, "First metric name")->required();
  corr_cmd->add_option("--y", corr.y, "Second metric name")->required();
  corr_cmd->add_option("--method", corr.method, "pearson or spearman")
      ->check(CLI::IsMember({"pearson", "spearman"}))->capture_default_str();

  TimingArgs timing;
  auto* timing_cmd = app.add_subcommand("timings", "Wall-clock each metric (1 warm-up, then timed runs)");
  timing_cmd->add_option("--external", timing.external, "External embeddings")->required()->check(existing);
  timing_cmd->add_option("--test", timing.test, "Test embeddings")->required()->check(existing);
  timing_cmd->add_option("--text", timing.text, "Per-class text embeddings")->check(existing);
  timing_cmd->add_option("--runs", timing.runs, "Timed runs")->capture_default_str();
  timing_cmd->add_flag("--probe", timing.probe, "Include the linear probe");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    std::string result;
    if (*cler_cmd) result = run_cler(cler, g);
    else if (*probe_cmd) result = run_probe(probe, g, err);
    else if (*fid_cmd) result = run_fid(fid_a, fid_b, g, fid_tags);
    else if (*clip_cmd) result = run_clipscore(clip_images, clip_text, g, clip_tags);
    else if (*mts_cmd) result = run_mts(mts, g);
    else if (*retrieve_cmd) result = run_retrieve(retrieve, g);
    else if (*prompts_cmd) result = run_prompts(prompts, g);
    else if (*cost_cmd) result = run_cost(cost, g);
    else if (*report_cmd) result = run_report(report_paths, report_metric, g);
    else if (*corr_cmd) result = run_correlate(corr, g);
    else if (*timing_cmd) result = run_timings(timing, g);
    write_output(result, g, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace genbench::cli
