#pragma once

// Class-centered recognition score: a training-free nearest-prototype
// classifier built from candidate external data and scored on a downstream
// test set, plus the text-embedding zero-shot baseline and their ensemble.
//
// All similarities are dot products of unit-norm vectors. Class centers are
// the mean of a class's normalized rows, re-normalized. Ties go to the lowest
// class index.

#include <cstddef>
#include <vector>

#include "genbench/embedstore.hpp"
#include "genbench/prediction.hpp"

namespace genbench {

struct ClassCenters {
  Matrix<float> centers;                    // C x F, unit rows
  std::vector<std::size_t> shots_per_class;  // rows averaged into each center

  std::size_t num_classes() const noexcept { return centers.rows(); }
  std::size_t dim() const noexcept { return centers.cols(); }
};

/// Throws MissingClassError if a class has no rows.
ClassCenters class_centers(const EmbeddingSet& external);

PredictionVector predict_centered(const ClassCenters& centers, const EmbeddingSet& test);
PredictionVector predict_zero_shot(const TextEmbeddings& text, const EmbeddingSet& test);
/// Argmax of the averaged center and text score matrices.
PredictionVector predict_ensemble(const ClassCenters& centers, const TextEmbeddings& text,
                                  const EmbeddingSet& test);

double cler_score(const ClassCenters& centers, const EmbeddingSet& test);
double zero_shot_score(const TextEmbeddings& text, const EmbeddingSet& test);
double cler_ensemble(const ClassCenters& centers, const TextEmbeddings& text,
                     const EmbeddingSet& test);

/// Signed improvement of a score over a baseline.
double cler_delta(double score, double baseline);

}  // namespace genbench
