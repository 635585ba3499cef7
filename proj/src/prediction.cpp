#include "genbench/prediction.hpp"

#include <string>

namespace genbench {

std::int32_t argmax(std::span<const double> scores) noexcept {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  return static_cast<std::int32_t>(best);
}

PredictionVector from_scores(Matrix<double> scores) {
  PredictionVector out;
  out.predicted.reserve(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) out.predicted.push_back(argmax(scores.row(i)));
  out.scores = std::move(scores);
  return out;
}

double accuracy(std::span<const std::int32_t> predicted, std::span<const std::int32_t> labels) {
  if (predicted.size() != labels.size()) {
    throw ShapeError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ValidationError("accuracy of an empty set is undefined");
  std::size_t correct = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (predicted[k] == labels[k]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace genbench
