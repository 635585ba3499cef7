#include "genbench/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace genbench {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr double kMinStep = 1e-20;
constexpr double kMaxStep = 1e6;

void check_train_set(const EmbeddingSet& train) {
  require_labeled(train, "probe training data");
  std::vector<bool> present(train.num_classes(), false);
  for (auto label : train.labels) present[static_cast<std::size_t>(label)] = true;
  for (std::size_t j = 0; j < present.size(); ++j) {
    if (!present[j]) {
      throw MissingClassError("class '" + train.class_names[j] + "' (index " + std::to_string(j) +
                              ") is absent from the probe training data");
    }
  }
}

// Loss and, when `gradient` is non-null, its gradient. One code path for both
// so the line search and the trace see identical values.
double evaluate(const EmbeddingSet& train, double lambda, const ProbeParameters& params,
                ProbeParameters* gradient) {
  const std::size_t classes = params.weights.rows();
  const std::size_t dim = params.weights.cols();
  const std::size_t n = train.size();
  std::vector<double> logits(classes);

  if (gradient != nullptr) *gradient = ProbeParameters::zeros(classes, dim);

  double data_loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = train.row(i);
    for (std::size_t j = 0; j < classes; ++j) {
      logits[j] = dot(params.weights.row(j), x) + params.biases[j];
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double partition = 0.0;
    for (double z : logits) partition += std::exp(z - peak);
    const double log_partition = peak + std::log(partition);
    const auto label = static_cast<std::size_t>(train.labels[i]);
    data_loss += log_partition - logits[label];

    if (gradient != nullptr) {
      for (std::size_t j = 0; j < classes; ++j) {
        const double residual = std::exp(logits[j] - log_partition) - (j == label ? 1.0 : 0.0);
        auto grad_row = gradient->weights.row(j);
        for (std::size_t d = 0; d < dim; ++d) grad_row[d] += residual * static_cast<double>(x[d]);
        gradient->biases[j] += residual;
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  double weight_norm = 0.0;
  for (double w : params.weights.values()) weight_norm += w * w;

  if (gradient != nullptr) {
    auto gw = gradient->weights.values();
    const auto w = params.weights.values();
    for (std::size_t k = 0; k < gw.size(); ++k) gw[k] = gw[k] * inv_n + lambda * w[k];
    for (auto& gb : gradient->biases) gb *= inv_n;
  }
  return data_loss * inv_n + 0.5 * lambda * weight_norm;
}

double inf_norm(const ProbeParameters& p) {
  double out = 0.0;
  for (double v : p.weights.values()) out = std::max(out, std::abs(v));
  for (double v : p.biases) out = std::max(out, std::abs(v));
  return out;
}

double squared_norm(const ProbeParameters& p) {
  double out = 0.0;
  for (double v : p.weights.values()) out += v * v;
  for (double v : p.biases) out += v * v;
  return out;
}

ProbeParameters step_along(const ProbeParameters& from, const ProbeParameters& direction,
                           double step) {
  ProbeParameters out = from;
  auto w = out.weights.values();
  const auto dw = direction.weights.values();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] -= step * dw[k];
  for (std::size_t j = 0; j < out.biases.size(); ++j) out.biases[j] -= step * direction.biases[j];
  return out;
}

}  // namespace

ObjectiveEvaluation probe_objective(const EmbeddingSet& train, double lambda,
                                    const ProbeParameters& params) {
  require_labeled(train, "probe objective");
  if (params.weights.rows() != train.num_classes() || params.weights.cols() != train.dim() ||
      params.biases.size() != train.num_classes()) {
    throw ShapeError("probe parameters do not match the training set shape");
  }
  ObjectiveEvaluation out{0.0, {}};
  out.loss = evaluate(train, lambda, params, &out.gradient);
  return out;
}

ProbeModel train_linear_probe(const EmbeddingSet& train, const ProbeOptions& options) {
  if (!(options.lambda >= 0.0) || !std::isfinite(options.lambda)) {
    throw ValidationError("probe lambda must be a finite nonnegative number");
  }
  if (options.max_iter <= 0) throw ValidationError("probe max_iter must be positive");
  if (!(options.tol > 0.0)) throw ValidationError("probe tol must be positive");
  check_train_set(train);

  auto params = ProbeParameters::zeros(train.num_classes(), train.dim());
  ProbeParameters gradient;
  double loss = evaluate(train, options.lambda, params, &gradient);
  if (!std::isfinite(loss)) throw NumericalError("probe loss is not finite at the starting point");

  ProbeModel model;
  model.lambda = options.lambda;
  model.class_names = train.class_names;
  model.trace.push_back({0, loss});

  double step = 0.5;  // doubled before first use
  for (int iteration = 1; iteration <= options.max_iter; ++iteration) {
    if (inf_norm(gradient) < options.tol) {
      model.converged = true;
      break;
    }
    const double grad_sq = squared_norm(gradient);
    double trial_step = std::min(2.0 * step, kMaxStep);
    bool accepted = false;
    ProbeParameters candidate;
    while (trial_step >= kMinStep) {
      candidate = step_along(params, gradient, trial_step);
      const double trial = evaluate(train, options.lambda, candidate, nullptr);
      if (std::isfinite(trial) && trial <= loss - kArmijo * trial_step * grad_sq) {
        accepted = true;
        break;
      }
      trial_step *= kShrink;
    }
    if (!accepted) break;  // no representable descent step remains

    params = std::move(candidate);
    step = trial_step;
    loss = evaluate(train, options.lambda, params, &gradient);
    if (!std::isfinite(loss)) throw NumericalError("probe loss became non-finite");
    model.trace.push_back({iteration, loss});
  }
  if (!model.converged && inf_norm(gradient) < options.tol) model.converged = true;

  for (double w : params.weights.values()) {
    if (!std::isfinite(w)) throw NumericalError("probe weights are not finite");
  }
  model.weights = std::move(params.weights);
  model.biases = std::move(params.biases);
  return model;
}

PredictionVector probe_scores(const ProbeModel& model, const EmbeddingSet& test) {
  if (test.dim() != model.weights.cols()) {
    throw ShapeError("probe expects dimension " + std::to_string(model.weights.cols()) +
                     ", test embeddings have " + std::to_string(test.dim()));
  }
  const std::size_t classes = model.weights.rows();
  Matrix<double> scores(test.size(), classes);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto x = test.row(i);
    auto out = scores.row(i);
    for (std::size_t j = 0; j < classes; ++j) out[j] = dot(model.weights.row(j), x) + model.biases[j];
  }
  return from_scores(std::move(scores));
}

namespace {

double roc_auc(const PredictionVector& preds, std::span<const std::int32_t> labels) {
  const std::size_t n = labels.size();
  std::vector<double> margin(n);
  for (std::size_t i = 0; i < n; ++i) margin[i] = preds.scores(i, 1) - preds.scores(i, 0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return margin[a] < margin[b]; });

  // Mann-Whitney U with average ranks for ties.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && margin[order[end]] == margin[order[start]]) ++end;
    const double average_rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += average_rank;
        ++positives;
      }
    }
    start = end;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw ValidationError("roc_auc needs at least one positive and one negative instance");
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double average_precision_11pt(const PredictionVector& preds, std::span<const std::int32_t> labels,
                              std::size_t cls, std::size_t positives) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds.scores(a, cls) > preds.scores(b, cls);
  });

  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (static_cast<std::size_t>(labels[order[k]]) == cls) ++hits;
    precision[k] = static_cast<double>(hits) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(hits) / static_cast<double>(positives);
  }

  double ap = 0.0;
  for (int t = 0; t <= 10; ++t) {
    const double threshold = static_cast<double>(t) / 10.0;
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (recall[k] >= threshold - 1e-12) best = std::max(best, precision[k]);
    }
    ap += best;
  }
  return ap / 11.0;
}

}  // namespace

MetricResult evaluate_metric(const PredictionVector& preds, std::span<const std::int32_t> labels,
                             MetricKind kind) {
  const std::size_t n = labels.size();
  const std::size_t classes = preds.scores.cols();
  if (n == 0) throw ValidationError("cannot evaluate a metric on zero instances");
  if (preds.predicted.size() != n || preds.scores.rows() != n) {
    throw ShapeError("predictions and labels differ in length");
  }
  for (auto label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw ValidationError("label " + std::to_string(label) + " is outside the score columns");
    }
  }

  MetricResult result;
  std::vector<std::size_t> support(classes, 0);
  for (auto label : labels) ++support[static_cast<std::size_t>(label)];

  switch (kind) {
    case MetricKind::accuracy:
      result.value = accuracy(preds.predicted, labels);
      break;

    case MetricKind::mean_per_class: {
      std::vector<std::size_t> correct(classes, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (preds.predicted[i] == labels[i]) ++correct[static_cast<std::size_t>(labels[i])];
      }
      double sum = 0.0;
      std::size_t counted = 0;
      for (std::size_t j = 0; j < classes; ++j) {
        if (support[j] == 0) {
          result.warnings.push_back("class " + std::to_string(j) +
                                    " has no test instances; skipped in mean_per_class");
          continue;
        }
        sum += static_cast<double>(correct[j]) / static_cast<double>(support[j]);
        ++counted;
      }
      result.value = sum / static_cast<double>(counted);
      break;
    }

    case MetricKind::roc_auc:
      if (classes != 2) {
        throw ValidationError("roc_auc requires exactly 2 classes, got " + std::to_string(classes));
      }
      result.value = roc_auc(preds, labels);
      break;

    case MetricKind::map_11pt: {
      double sum = 0.0;
      std::size_t counted = 0;
      for (std::size_t j = 0; j < classes; ++j) {
        if (support[j] == 0) {
          result.warnings.push_back("class " + std::to_string(j) +
                                    " has no test instances; skipped in map_11pt");
          continue;
        }
        sum += average_precision_11pt(preds, labels, j, support[j]);
        ++counted;
      }
      result.value = sum / static_cast<double>(counted);
      break;
    }
  }
  return result;
}

void save_probe_model(const ProbeModel& model, const std::filesystem::path& path) {
  const std::size_t classes = model.weights.rows();
  if (model.class_names.size() != classes || model.biases.size() != classes) {
    throw ShapeError("probe model has inconsistent class count");
  }
  EmbeddingSet set;
  std::vector<float> values;
  values.reserve(model.weights.values().size());
  for (double w : model.weights.values()) values.push_back(static_cast<float>(w));
  set.vectors = Matrix<float>(classes, model.weights.cols(), std::move(values));
  set.labels.resize(classes);
  std::iota(set.labels.begin(), set.labels.end(), 0);
  set.class_names = model.class_names;
  set.normalized = false;
  set.source_kind = SourceKind::text;
  set.metadata = {{"model", "probe"},
                  {"lambda", model.lambda},
                  {"biases", model.biases},
                  {"converged", model.converged},
                  {"iterations", model.trace.empty() ? 0 : model.trace.back().iteration}};
  save_embedding_set(set, path);
}

ProbeModel load_probe_model(const std::filesystem::path& path) {
  const EmbeddingSet set = load_embedding_set(path);
  if (set.metadata.value("model", std::string()) != "probe") {
    throw FormatError("'" + path.string() + "' does not hold a probe model");
  }
  const auto biases = set.metadata.find("biases");
  if (biases == set.metadata.end() || !biases->is_array() || biases->size() != set.size()) {
    throw FormatError("probe model biases missing or inconsistent");
  }
  ProbeModel model;
  std::vector<double> weights(set.vectors.values().begin(), set.vectors.values().end());
  model.weights = Matrix<double>(set.size(), set.dim(), std::move(weights));
  model.biases = biases->get<std::vector<double>>();
  model.lambda = set.metadata.value("lambda", 0.0);
  model.converged = set.metadata.value("converged", false);
  model.class_names = set.class_names;
  return model;
}

}  // namespace genbench
