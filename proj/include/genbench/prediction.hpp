#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "genbench/matrix.hpp"

namespace genbench {

/// Per-row class scores and the argmax label of each row.
struct PredictionVector {
  std::vector<std::int32_t> predicted;
  Matrix<double> scores;
};

/// Index of the largest value; the lowest index wins ties.
std::int32_t argmax(std::span<const double> scores) noexcept;

/// Fills `predicted` from `scores` with the argmax rule.
PredictionVector from_scores(Matrix<double> scores);

/// Fraction of rows whose prediction equals the label.
double accuracy(std::span<const std::int32_t> predicted, std::span<const std::int32_t> labels);

}  // namespace genbench
