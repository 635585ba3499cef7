#pragma once

// Linear probe: L2-regularized multinomial logistic regression on frozen
// embeddings, trained by full-batch gradient descent with Armijo
// backtracking. Also hosts the evaluation metrics used on probe and
// prototype predictions.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "genbench/embedstore.hpp"
#include "genbench/manifest.hpp"
#include "genbench/prediction.hpp"

namespace genbench {

struct ProbeOptions {
  double lambda = 1e-4;
  int max_iter = 500;
  double tol = 1e-6;
};

struct ProbeParameters {
  Matrix<double> weights;     // C x F
  std::vector<double> biases;  // C

  static ProbeParameters zeros(std::size_t classes, std::size_t dim) {
    return {Matrix<double>(classes, dim), std::vector<double>(classes, 0.0)};
  }
};

struct TracePoint {
  int iteration;
  double loss;
};

struct ProbeModel {
  Matrix<double> weights;
  std::vector<double> biases;
  double lambda = 0.0;
  std::vector<TracePoint> trace;  // iteration 0 is the starting point
  std::vector<std::string> class_names;
  bool converged = false;  // gradient inf-norm fell below tol
};

struct ObjectiveEvaluation {
  double loss;
  ProbeParameters gradient;
};

/// Mean softmax cross-entropy plus (lambda/2)*||W||_F^2, with its gradient.
/// Biases are not regularized.
ObjectiveEvaluation probe_objective(const EmbeddingSet& train, double lambda,
                                    const ProbeParameters& params);

ProbeModel train_linear_probe(const EmbeddingSet& train, const ProbeOptions& options = {});

/// scores = test * W^T + b
PredictionVector probe_scores(const ProbeModel& model, const EmbeddingSet& test);

struct MetricResult {
  double value = 0.0;
  std::vector<std::string> warnings;
};

/// accuracy: fraction correct.
/// mean_per_class: mean per-class recall over classes present in `labels`.
/// roc_auc: two classes only; ranks rows by score[1] - score[0], ties count 1/2.
/// map_11pt: mean over classes of one-vs-rest 11-point interpolated AP.
MetricResult evaluate_metric(const PredictionVector& preds, std::span<const std::int32_t> labels,
                             MetricKind kind);

/// Stored as a text-kind .gbe: one f32 weight row per class, with
/// {"model":"probe","lambda":..,"biases":[..]} in the header. Weights lose
/// precision to f32.
void save_probe_model(const ProbeModel& model, const std::filesystem::path& path);
ProbeModel load_probe_model(const std::filesystem::path& path);

}  // namespace genbench
