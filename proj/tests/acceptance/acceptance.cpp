// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and time
// limits are fixed here and not configurable.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "genbench/analysis.hpp"
#include "genbench/cler.hpp"
#include "genbench/costmodel.hpp"
#include "genbench/distmetrics.hpp"
#include "genbench/probe.hpp"
#include "genbench/promptgen.hpp"
#include "genbench/retrieval.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace genbench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kFixtures = GENBENCH_FIXTURES;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && pass) {
      pass = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome cler_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> classes(1, 20), dims(1, 64);
  const auto start = Clock::now();
  int matched = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = classes(rng);
    const auto f = dims(rng);
    std::uniform_int_distribution<std::size_t> rows(c, 500);
    const auto external = gbtest::random_set(rng, rows(rng), f, c);
    const auto test = gbtest::random_set(rng, rows(rng), f, c, true, SourceKind::test);
    const double got = cler_score(class_centers(external), test);
    const double want = gbtest::oracle_nearest_centroid(external, test);
    o.require(got == want, "instance " + std::to_string(trial) + ": " + fmt(got, 17) + " != " + fmt(want, 17));
    matched += got == want;
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 5.0, "took " + fmt(elapsed) + " s");
  if (o.pass) o.detail = std::to_string(matched) + "/50 bit-exact, " + fmt(elapsed, 3) + " s";
  return o;
}

Outcome ensemble_degeneracy() {
  Outcome o;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t c = 2 + trial % 10;
    const std::size_t f = 3 + 3 * trial;
    const auto external = gbtest::random_set(rng, 8 * c, f, c);
    const auto test = gbtest::random_set(rng, 150, f, c, true, SourceKind::test);
    const auto centers = class_centers(external);
    const auto text = make_text_embeddings(centers.centers, external.class_names);
    o.require(predict_ensemble(centers, text, test).predicted == predict_centered(centers, test).predicted,
              "instance " + std::to_string(trial) + " differs");
  }
  if (o.pass) o.detail = "20/20 instances identical per row";
  return o;
}

Outcome cost_reproduction() {
  Outcome o;
  const auto table = default_cost_table();
  const double generative = total_cost(table, SourceKind::generative, 500, 1638).dollars();
  const double original = total_cost(table, SourceKind::original, 500, 1638).dollars();
  o.require(std::abs(generative - 208.03) <= 0.01, "generative " + fmt(generative, 10));
  o.require(std::abs(original - 9828.00) <= 0.01, "original " + fmt(original, 10));
  if (o.pass) o.detail = "generative " + fmt(generative, 8) + " USD, original " + fmt(original, 8) + " USD";
  return o;
}

Outcome table2_aggregation() {
  Outcome o;
  const auto report = aggregate_report(load_records_csv(kFixtures / "table2.csv"));
  const std::vector<double> expected = {48.48, 46.93, 52.04, 48.83, 47.68, 51.60, 51.10, 52.01};
  o.require(report.row_means.size() == expected.size(), "row count " + std::to_string(report.row_means.size()));
  std::string means;
  for (std::size_t i = 0; o.pass && i < expected.size(); ++i) {
    const auto& row = report.row_means[i];
    o.require(std::abs(row.mean - expected[i]) <= 0.01,
              row.model + "/" + row.strategy + " mean " + fmt(row.mean) + " vs " + fmt(expected[i]));
    means += (i ? " " : "") + fmt(row.mean, 6);
  }
  if (o.pass) o.detail = "means " + means;
  return o;
}

// Haar-ish random rotation by Gram-Schmidt on Gaussian columns.
std::vector<std::vector<double>> random_rotation(std::mt19937_64& rng, std::size_t f) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> q(f, std::vector<double>(f));
  for (auto& v : q) {
    for (auto& x : v) x = g(rng);
  }
  for (std::size_t i = 0; i < f; ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) {
        double d = 0.0;
        for (std::size_t k = 0; k < f; ++k) d += q[i][k] * q[j][k];
        for (std::size_t k = 0; k < f; ++k) q[i][k] -= d * q[j][k];
      }
    }
    double n = 0.0;
    for (double x : q[i]) n += x * x;
    for (double& x : q[i]) x /= std::sqrt(n);
  }
  return q;
}

GaussianStats rotate(const GaussianStats& s, const std::vector<std::vector<double>>& q) {
  const std::size_t f = s.dim();
  GaussianStats out{std::vector<double>(f, 0.0), Matrix<double>(f, f), s.count};
  Matrix<double> qc(f, f);
  for (std::size_t r = 0; r < f; ++r) {
    for (std::size_t k = 0; k < f; ++k) {
      out.mean[r] += q[r][k] * s.mean[k];
      for (std::size_t m = 0; m < f; ++m) qc(r, k) += q[r][m] * s.covariance(m, k);
    }
  }
  for (std::size_t r = 0; r < f; ++r) {
    for (std::size_t c = r; c < f; ++c) {
      double v = 0.0;
      for (std::size_t k = 0; k < f; ++k) v += qc(r, k) * q[c][k];
      out.covariance(r, c) = v;
      out.covariance(c, r) = v;
    }
  }
  return out;
}

Outcome fid_numerics() {
  Outcome o;
  const auto start = Clock::now();
  const GaussianStats a{{0.0}, Matrix<double>(1, 1, std::vector<double>{1.0}), 2};
  const GaussianStats b{{3.0}, Matrix<double>(1, 1, std::vector<double>{4.0}), 2};
  const double closed = frechet_distance(a, b);
  o.require(std::abs(closed - 10.0) <= 1e-8, "1-D case gave " + fmt(closed, 17));

  std::mt19937_64 rng(64);
  double worst_self = 0.0, worst_sym = 0.0, worst_rot = 0.0;
  for (std::size_t f : {2u, 8u, 16u, 32u, 64u}) {
    const auto x = gbtest::random_set(rng, 4 * f, f, 1);
    const auto y = gbtest::random_set(rng, 4 * f, f, 1);
    const auto sx = gaussian_stats(x);
    const auto sy = gaussian_stats(y);
    const double self = frechet_distance(sx, sx);
    const double forward = frechet_distance(sx, sy);
    const double sym = std::abs(forward - frechet_distance(sy, sx));
    const auto q = random_rotation(rng, f);
    const double rot = std::abs(forward - frechet_distance(rotate(sx, q), rotate(sy, q)));
    worst_self = std::max(worst_self, self);
    worst_sym = std::max(worst_sym, sym);
    worst_rot = std::max(worst_rot, rot);
  }
  o.require(worst_self <= 1e-6, "FID(X,X) = " + fmt(worst_self));
  o.require(worst_sym <= 1e-8, "asymmetry " + fmt(worst_sym));
  o.require(worst_rot <= 1e-6, "rotation drift " + fmt(worst_rot));
  const double elapsed = seconds_since(start);
  o.require(elapsed < 1.0, "took " + fmt(elapsed) + " s");
  if (o.pass) {
    o.detail = "1-D " + fmt(closed, 12) + ", self " + fmt(worst_self, 3) + ", sym " + fmt(worst_sym, 3) + ", rot " +
               fmt(worst_rot, 3) + ", " + fmt(elapsed, 3) + " s";
  }
  return o;
}

Outcome probe_gradient() {
  Outcome o;
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> g(0.0, 0.5);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t c = 2 + trial % 4;   // <= 5
    const std::size_t f = 1 + trial;       // <= 10
    const auto train = gbtest::random_set(rng, 25, f, c);
    auto params = ProbeParameters::zeros(c, f);
    for (auto& w : params.weights.values()) w = g(rng);
    for (auto& bias : params.biases) bias = g(rng);
    const double lambda = 1e-3;
    const auto analytic = probe_objective(train, lambda, params).gradient;
    auto check = [&](double a, double numeric) {
      const double rel = std::abs(a - numeric) / std::max({1e-8, std::abs(a), std::abs(numeric)});
      worst = std::max(worst, rel);
    };
    const double h = 1e-6;
    for (std::size_t k = 0; k < params.weights.values().size(); ++k) {
      auto up = params, down = params;
      up.weights.values()[k] += h;
      down.weights.values()[k] -= h;
      check(analytic.weights.values()[k],
            (probe_objective(train, lambda, up).loss - probe_objective(train, lambda, down).loss) / (2 * h));
    }
    for (std::size_t j = 0; j < c; ++j) {
      auto up = params, down = params;
      up.biases[j] += h;
      down.biases[j] -= h;
      check(analytic.biases[j],
            (probe_objective(train, lambda, up).loss - probe_objective(train, lambda, down).loss) / (2 * h));
    }
  }
  o.require(worst <= 1e-4, "gradient relative error " + fmt(worst));

  const auto toy = gbtest::blob_set(3, 30, 6, 2, 0.05, SourceKind::original);
  const auto model = train_linear_probe(toy, ProbeOptions{1e-4, 500, 1e-6});
  const double acc = evaluate_metric(probe_scores(model, toy), toy.labels, MetricKind::accuracy).value;
  o.require(acc == 1.0, "toy training accuracy " + fmt(acc));
  o.require(model.trace.back().iteration <= 500, "more than 500 iterations");
  if (o.pass) {
    o.detail = "max rel err " + fmt(worst, 3) + ", toy accuracy 1 after " +
               std::to_string(model.trace.back().iteration) + " iterations";
  }
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<int> coarse(0, 3);
  std::normal_distribution<double> fine(0.0, 1.0);
  int instances = 0;
  for (std::size_t n = 2; n <= 50; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<std::int32_t> labels(n);
      for (auto& l : labels) l = static_cast<std::int32_t>(rng() % 2);
      labels[0] = 0;
      labels[1] = 1;
      std::vector<double> flat, margin;
      for (std::size_t i = 0; i < n; ++i) {
        const double s0 = rep % 2 ? coarse(rng) : fine(rng);
        const double s1 = rep % 2 ? coarse(rng) : fine(rng);
        flat.insert(flat.end(), {s0, s1});
        margin.push_back(s1 - s0);
      }
      const auto preds = from_scores(Matrix<double>(n, 2, flat));
      const double got = evaluate_metric(preds, labels, MetricKind::roc_auc).value;
      const double want = gbtest::oracle_pair_auc(margin, labels);
      o.require(std::abs(got - want) <= 1e-12, "AUC n=" + std::to_string(n) + ": " + fmt(got) + " vs " + fmt(want));
      ++instances;
    }
  }

  for (std::size_t c = 1; c <= 6; ++c) {
    const std::size_t n = 20;
    std::vector<std::int32_t> labels(n);
    std::vector<double> flat(n * c);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<std::int32_t>(i % c);
      for (std::size_t j = 0; j < c; ++j) flat[i * c + j] = labels[i] == static_cast<std::int32_t>(j) ? 1.0 + i : -1.0 - i;
    }
    const double map = evaluate_metric(from_scores(Matrix<double>(n, c, flat)), labels, MetricKind::map_11pt).value;
    o.require(std::abs(map - 1.0) <= 1e-12, "perfect map_11pt gave " + fmt(map));
  }

  {
    // 3 of 4 right in class 0, 0 of 1 in class 1 -> (0.75 + 0) / 2
    const std::vector<std::int32_t> labels = {0, 0, 0, 0, 1};
    const auto preds = from_scores(Matrix<double>(5, 2, {1, 0, 1, 0, 1, 0, 0, 1, 1, 0}));
    const double v = evaluate_metric(preds, labels, MetricKind::mean_per_class).value;
    o.require(std::abs(v - 0.375) <= 1e-12, "mean_per_class hand case 1 gave " + fmt(v));
    // every class right -> 1, class without support skipped
    const std::vector<std::int32_t> skip = {0, 2, 2};
    const auto preds2 = from_scores(Matrix<double>(3, 3, {1, 0, 0, 0, 0, 1, 0, 0, 1}));
    const auto r = evaluate_metric(preds2, skip, MetricKind::mean_per_class);
    o.require(std::abs(r.value - 1.0) <= 1e-12 && r.warnings.size() == 1, "mean_per_class hand case 2");
    // class 0: 1/2, class 1: 2/2, class 2: 0/1 -> 0.5
    const std::vector<std::int32_t> three = {0, 0, 1, 1, 2};
    const auto preds3 = from_scores(Matrix<double>(5, 3, {1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0}));
    const double v3 = evaluate_metric(preds3, three, MetricKind::mean_per_class).value;
    o.require(std::abs(v3 - 0.5) <= 1e-12, "mean_per_class hand case 3 gave " + fmt(v3));
  }
  if (o.pass) o.detail = std::to_string(instances) + " AUC instances exact, perfect mAP = 1, hand cases match";
  return o;
}

Outcome retrieval_exactness() {
  Outcome o;
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<std::size_t> rows(1, 5000), dims(2, 48);
  for (int trial = 0; trial < 50 && o.pass; ++trial) {
    const auto n = rows(rng);
    const auto f = dims(rng);
    auto corpus = gbtest::random_set(rng, n, f, 1);
    if (trial % 4 == 0) {
      for (std::size_t i = 1; i < n; i += 2) std::copy_n(corpus.row(i - 1).begin(), f, corpus.vectors.row(i).begin());
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("id" + std::to_string((i * 7919) % 100003) + "_" + std::to_string(i));
    const RetrievalIndex index(corpus, ids);
    const auto query = gbtest::random_set(rng, 1, f, 1);
    const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 100);
    const auto hits = topk(index, query.row(0), k);
    const auto want = gbtest::oracle_full_scan(corpus, ids, query.row(0), k);
    o.require(hits.size() == k, "wrong hit count");
    for (std::size_t r = 0; o.pass && r < k; ++r) {
      o.require(hits[r].id == want[r].first && hits[r].similarity == want[r].second,
                "corpus " + std::to_string(trial) + " rank " + std::to_string(r + 1));
    }
  }
  EmbeddingSet same;
  same.vectors = Matrix<float>(5, 3, {0.0f, 0.6f, 0.8f, 0.0f, 0.6f, 0.8f, 0.0f, 0.6f, 0.8f, 0.0f, 0.6f, 0.8f, 0.0f, 0.6f, 0.8f});
  same.labels = std::vector<std::int32_t>(5, 0);
  same.class_names = {"caption"};
  same.normalized = true;
  const RetrievalIndex identical(same, {"a", "b", "c", "d", "e"});
  const std::vector<float> q = {0.0f, 0.6f, 0.8f};
  const double mts = category_mts(identical, q, 5);
  o.require(std::abs(mts - 1.0) <= 1e-6, "identical-corpus MTS " + fmt(mts));
  if (o.pass) o.detail = "50/50 corpora match full scan, identical-corpus MTS " + fmt(mts, 8);
  return o;
}

Outcome pearson_suite() {
  Outcome o;
  std::vector<double> x, y;
  for (int i = 1; i <= 10; ++i) {
    x.push_back(i);
    y.push_back(2.0 * i + 1.0);
  }
  const double r = pearson_r(x, y);
  o.require(std::abs(r - 1.0) <= 1e-12, "y=2x+1 gave " + fmt(r, 17));

  std::mt19937_64 rng(31337);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.05, 20.0), shift(-100.0, 100.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + trial % 60;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = g(rng);
      b[i] = 0.3 * a[i] + g(rng);
    }
    const double base = pearson_r(a, b);
    const double sa = scale(rng), sb = scale(rng), ta = shift(rng), tb = shift(rng);
    std::vector<double> fa(n), fb(n), nb(n);
    for (std::size_t i = 0; i < n; ++i) {
      fa[i] = sa * a[i] + ta;
      fb[i] = sb * b[i] + tb;
      nb[i] = -sb * b[i] + tb;
    }
    worst = std::max(worst, std::abs(pearson_r(fa, fb) - base));
    worst = std::max(worst, std::abs(pearson_r(fa, nb) + base));
  }
  o.require(worst <= 1e-10, "affine drift " + fmt(worst));
  if (o.pass) o.detail = "r(2x+1) = " + fmt(r, 17) + ", affine drift " + fmt(worst, 3) + " over 500 cases";
  return o;
}

Outcome prompt_fidelity() {
  Outcome o;
  const auto pets = load_manifest(kFixtures / "manifests" / "oxford-pets.json");
  const auto cifar = load_manifest(kFixtures / "manifests" / "cifar-10.json");
  const auto dt = render_prompts(pets, "British Shorthair", PromptStrategy::parse("dt"), 1, 0);
  o.require(dt.size() == 1 && dt[0].positive == "a photo of a British Shorthair, a type of pet.",
            "DT gave '" + (dt.empty() ? std::string() : dt[0].positive) + "'");
  const auto rd = render_prompts(pets, "British Shorthair", PromptStrategy::parse("dt+rd"), 1, 0);
  o.require(rd[0].positive == dt[0].positive + ", ((sharp focus)), ((highly detailed)), ((hires))",
            "RD gave '" + rd[0].positive + "'");
  const auto st = render_prompts(cifar, "airplane", PromptStrategy::parse("st"), 1, 0);
  o.require(st[0].positive == "a photo of airplane", "ST gave '" + st[0].positive + "'");
  for (const char* spec : {"st", "dt", "dt+np", "dt+np+rd"}) {
    for (std::uint64_t seed : {0ull, 1ull, 123456789ull}) {
      const auto once = render_prompts(cifar, "airplane", PromptStrategy::parse(spec), 37, seed);
      const auto again = render_prompts(cifar, "airplane", PromptStrategy::parse(spec), 37, seed);
      o.require(once == again, std::string("rerun differs for ") + spec);
      o.require(once.size() == 37, "count contract");
    }
  }
  if (o.pass) o.detail = "DT and RD strings byte-exact, seeded reruns identical";
  return o;
}

// --- end to end through the command-line binary --------------------------

struct Command {
  int status = -1;
  std::string out;
};

Command shell(const std::string& command) {
  Command c;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return c;
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) c.out.append(buffer, got);
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

double value_of(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "\t");
  if (pos == std::string::npos) return NAN;
  return std::stod(text.substr(pos + key.size() + 1));
}

Outcome end_to_end() {
  Outcome o;
  gbtest::TempDir dir;
  const auto start = Clock::now();
  save_embedding_set(gbtest::blob_set(1, 50, 32, 3, 0.2, SourceKind::generative), dir / "external.gbe");
  save_embedding_set(gbtest::blob_set(2, 60, 32, 3, 0.2, SourceKind::test), dir / "test.gbe");
  const std::string cli = std::string("'") + GENBENCH_CLI + "' --threads 1";

  const auto cler = shell(cli + " cler --external " + quote(dir / "external.gbe") + " --test " + quote(dir / "test.gbe"));
  o.require(cler.status == 0, "cler exited " + std::to_string(cler.status) + ": " + cler.out);
  const double cler_acc = value_of(cler.out, "cler");
  o.require(cler_acc >= 0.95, "CLER " + fmt(cler_acc));

  const auto probe = shell(cli + " probe --train " + quote(dir / "external.gbe") + " --test " + quote(dir / "test.gbe"));
  o.require(probe.status == 0, "probe exited " + std::to_string(probe.status) + ": " + probe.out);
  const double probe_acc = value_of(probe.out, "probe_accuracy");
  o.require(probe_acc >= 0.95, "probe " + fmt(probe_acc));

  const auto fid = shell(cli + " fid --a " + quote(dir / "external.gbe") + " --b " + quote(dir / "test.gbe"));
  o.require(fid.status == 0, "fid exited " + std::to_string(fid.status) + ": " + fid.out);
  const double fid_value = value_of(fid.out, "fid");
  o.require(std::isfinite(fid_value) && fid_value >= 0.0, "fid " + fmt(fid_value));

  for (const char* sub : {"cler", "probe"}) {
    const std::string inputs = std::string(sub) == "cler" ? " --external " : " --train ";
    const auto r = shell(cli + " --format csv --out " + quote(dir / (std::string(sub) + ".csv")) + " " + sub + inputs +
                         quote(dir / "external.gbe") + " --test " + quote(dir / "test.gbe") +
                         " --model synthetic --strategy blobs");
    o.require(r.status == 0, std::string(sub) + " csv export failed: " + r.out);
  }
  const auto report = shell(cli + " report --records " + quote(dir / "cler.csv") + " --records " + quote(dir / "probe.csv"));
  o.require(report.status == 0, "report exited " + std::to_string(report.status) + ": " + report.out);
  o.require(report.out.find("cler\tsynthetic\tblobs\t") != std::string::npos &&
                report.out.find("probe_accuracy\tsynthetic\tblobs\t") != std::string::npos,
            "report output missing rows: " + report.out);

  const double elapsed = seconds_since(start);
  o.require(elapsed < 30.0, "took " + fmt(elapsed) + " s");
  if (o.pass) {
    o.detail = "CLER " + fmt(cler_acc) + ", probe " + fmt(probe_acc) + ", FID " + fmt(fid_value, 4) + ", " +
               fmt(elapsed, 3) + " s";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"cler_oracle_equivalence", cler_oracle},
      {"ensemble_degeneracy", ensemble_degeneracy},
      {"cost_reproduction", cost_reproduction},
      {"table2_fixture_aggregation", table2_aggregation},
      {"fid_numerics", fid_numerics},
      {"probe_gradient_check", probe_gradient},
      {"metric_oracles", metric_oracles},
      {"retrieval_exactness", retrieval_exactness},
      {"pearson", pearson_suite},
      {"prompt_determinism_fidelity", prompt_fidelity},
      {"end_to_end_synthetic_pipeline", end_to_end},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
    failures += outcome.pass ? 0 : 1;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
