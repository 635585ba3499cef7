#include "genbench/cler.hpp"

#include <cmath>
#include <string>

namespace genbench {

namespace {

void require_dim(std::size_t expected, const EmbeddingSet& test, std::string_view what) {
  if (test.dim() != expected) {
    throw ShapeError(std::string(what) + ": test embeddings have dimension " +
                     std::to_string(test.dim()) + ", expected " + std::to_string(expected));
  }
}

void require_class_count(std::size_t classes, const EmbeddingSet& test, std::string_view what) {
  if (test.num_classes() != classes) {
    throw ValidationError(std::string(what) + ": test set has " +
                          std::to_string(test.num_classes()) + " classes, scorer has " +
                          std::to_string(classes));
  }
}

void require_same_names(const TextEmbeddings& text, const EmbeddingSet& test) {
  if (text.class_names != test.class_names) {
    throw ValidationError("text embedding class names do not match the test set class names");
  }
}

Matrix<double> similarity(const Matrix<float>& prototypes, const EmbeddingSet& test) {
  Matrix<double> scores(test.size(), prototypes.rows());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto x = test.row(i);
    auto out = scores.row(i);
    for (std::size_t j = 0; j < prototypes.rows(); ++j) out[j] = dot(x, prototypes.row(j));
  }
  return scores;
}

}  // namespace

ClassCenters class_centers(const EmbeddingSet& external) {
  require_labeled(external, "external data");
  require_unit_rows(external.vectors, "external data");

  const std::size_t classes = external.num_classes();
  const std::size_t dim = external.dim();
  Matrix<double> sums(classes, dim);
  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t i = 0; i < external.size(); ++i) {
    const auto label = static_cast<std::size_t>(external.labels[i]);
    auto acc = sums.row(label);
    const auto x = external.row(i);
    for (std::size_t d = 0; d < dim; ++d) acc[d] += static_cast<double>(x[d]);
    ++counts[label];
  }

  ClassCenters out{Matrix<float>(classes, dim), counts};
  for (std::size_t j = 0; j < classes; ++j) {
    if (counts[j] == 0) {
      throw MissingClassError("class '" + external.class_names[j] + "' (index " +
                              std::to_string(j) + ") has no external samples");
    }
    auto mean = sums.row(j);
    for (auto& v : mean) v /= static_cast<double>(counts[j]);
    const double norm = std::sqrt(squared_norm(std::span<const double>(mean)));
    if (norm == 0.0) {
      throw DegenerateVectorError("center of class '" + external.class_names[j] +
                                      "' is the zero vector",
                                  j);
    }
    auto center = out.centers.row(j);
    for (std::size_t d = 0; d < dim; ++d) center[d] = static_cast<float>(mean[d] / norm);
  }
  return out;
}

PredictionVector predict_centered(const ClassCenters& centers, const EmbeddingSet& test) {
  require_dim(centers.dim(), test, "predict_centered");
  require_unit_rows(test.vectors, "test data");
  return from_scores(similarity(centers.centers, test));
}

PredictionVector predict_zero_shot(const TextEmbeddings& text, const EmbeddingSet& test) {
  require_same_names(text, test);
  require_dim(text.vectors.cols(), test, "zero-shot");
  require_unit_rows(test.vectors, "test data");
  return from_scores(similarity(text.vectors, test));
}

PredictionVector predict_ensemble(const ClassCenters& centers, const TextEmbeddings& text,
                                  const EmbeddingSet& test) {
  require_same_names(text, test);
  if (centers.num_classes() != text.num_classes() || centers.dim() != text.vectors.cols()) {
    throw ShapeError("class centers and text embeddings disagree in shape");
  }
  require_dim(centers.dim(), test, "ensemble");
  require_unit_rows(test.vectors, "test data");

  auto scores = similarity(centers.centers, test);
  const auto text_scores = similarity(text.vectors, test);
  auto combined = scores.values();
  const auto other = text_scores.values();
  for (std::size_t k = 0; k < combined.size(); ++k) combined[k] = (combined[k] + other[k]) / 2.0;
  return from_scores(std::move(scores));
}

double cler_score(const ClassCenters& centers, const EmbeddingSet& test) {
  require_class_count(centers.num_classes(), test, "cler_score");
  require_labeled(test, "test data");
  return accuracy(predict_centered(centers, test).predicted, test.labels);
}

double zero_shot_score(const TextEmbeddings& text, const EmbeddingSet& test) {
  require_labeled(test, "test data");
  return accuracy(predict_zero_shot(text, test).predicted, test.labels);
}

double cler_ensemble(const ClassCenters& centers, const TextEmbeddings& text,
                     const EmbeddingSet& test) {
  require_class_count(centers.num_classes(), test, "cler_ensemble");
  require_labeled(test, "test data");
  return accuracy(predict_ensemble(centers, text, test).predicted, test.labels);
}

double cler_delta(double score, double baseline) { return score - baseline; }

}  // namespace genbench
