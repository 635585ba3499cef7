#include "genbench/distmetrics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace genbench {

namespace {

constexpr double kEigenTolerance = 1e-6;
constexpr double kSymmetryTolerance = 1e-9;

Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  }
  return out;
}

void check_stats(const GaussianStats& s, const char* which) {
  const std::size_t f = s.dim();
  if (f == 0) throw ShapeError(std::string("gaussian stats '") + which + "' are empty");
  if (s.covariance.rows() != f || s.covariance.cols() != f) {
    throw ShapeError(std::string("covariance of '") + which + "' does not match the mean");
  }
  for (std::size_t r = 0; r < f; ++r) {
    for (std::size_t c = r + 1; c < f; ++c) {
      if (std::abs(s.covariance(r, c) - s.covariance(c, r)) > kSymmetryTolerance) {
        throw NumericalError(std::string("covariance of '") + which + "' is not symmetric");
      }
    }
  }
}

double clamp_eigenvalue(double value, const char* what) {
  if (value < -kEigenTolerance) {
    std::ostringstream msg;
    msg << what << " has eigenvalue " << value << ", matrix is not positive semidefinite";
    throw NumericalError(msg.str());
  }
  return value < 0.0 ? 0.0 : value;
}

}  // namespace

GaussianStats gaussian_stats(const EmbeddingSet& set) {
  const std::size_t n = set.size();
  const std::size_t f = set.dim();
  if (n < 2) {
    throw InsufficientDataError("gaussian stats need at least 2 rows, got " + std::to_string(n));
  }

  GaussianStats stats{std::vector<double>(f, 0.0), Matrix<double>(f, f), n};
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = set.row(i);
    for (std::size_t d = 0; d < f; ++d) stats.mean[d] += static_cast<double>(x[d]);
  }
  for (auto& m : stats.mean) m /= static_cast<double>(n);

  std::vector<double> centered(f);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = set.row(i);
    for (std::size_t d = 0; d < f; ++d) centered[d] = static_cast<double>(x[d]) - stats.mean[d];
    for (std::size_t r = 0; r < f; ++r) {
      for (std::size_t c = r; c < f; ++c) stats.covariance(r, c) += centered[r] * centered[c];
    }
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (std::size_t r = 0; r < f; ++r) {
    for (std::size_t c = r; c < f; ++c) {
      stats.covariance(r, c) *= scale;
      stats.covariance(c, r) = stats.covariance(r, c);
    }
  }
  return stats;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  check_stats(a, "a");
  check_stats(b, "b");
  if (a.dim() != b.dim()) {
    throw ShapeError("frechet distance between dimensions " + std::to_string(a.dim()) + " and " +
                     std::to_string(b.dim()));
  }

  const Eigen::MatrixXd cov_a = to_eigen(a.covariance);
  const Eigen::MatrixXd cov_b = to_eigen(b.covariance);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_a(cov_a);
  if (eig_a.info() != Eigen::Success) throw NumericalError("eigendecomposition of C_a failed");
  Eigen::VectorXd root = eig_a.eigenvalues();
  for (Eigen::Index k = 0; k < root.size(); ++k) root(k) = std::sqrt(clamp_eigenvalue(root(k), "C_a"));
  const Eigen::MatrixXd sqrt_a =
      eig_a.eigenvectors() * root.asDiagonal() * eig_a.eigenvectors().transpose();

  Eigen::MatrixXd product = sqrt_a * cov_b * sqrt_a;
  product = 0.5 * (product + product.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_product(product, Eigen::EigenvaluesOnly);
  if (eig_product.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of C_a^1/2 C_b C_a^1/2 failed");
  }
  double trace_sqrt = 0.0;
  for (Eigen::Index k = 0; k < eig_product.eigenvalues().size(); ++k) {
    trace_sqrt += std::sqrt(clamp_eigenvalue(eig_product.eigenvalues()(k), "C_a^1/2 C_b C_a^1/2"));
  }

  double mean_term = 0.0;
  for (std::size_t d = 0; d < a.dim(); ++d) {
    const double diff = a.mean[d] - b.mean[d];
    mean_term += diff * diff;
  }
  const double distance = mean_term + cov_a.trace() + cov_b.trace() - 2.0 * trace_sqrt;
  if (!std::isfinite(distance)) throw NumericalError("frechet distance is not finite");
  return distance < 0.0 ? 0.0 : distance;
}

double clip_score(const EmbeddingSet& images, const TextEmbeddings& text) {
  if (images.class_names != text.class_names) {
    throw ValidationError("image class names do not match the text embedding class names");
  }
  if (images.dim() != text.vectors.cols()) {
    throw ShapeError("image and text embeddings differ in dimension");
  }
  require_labeled(images, "clip_score images");

  double total = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto x = images.row(i);
    const auto t = text.vectors.row(static_cast<std::size_t>(images.labels[i]));
    const double denom = std::sqrt(squared_norm(x) * squared_norm(t));
    if (denom == 0.0) throw DegenerateVectorError("image row " + std::to_string(i) + " is zero", i);
    total += dot(x, t) / denom;
  }
  return total / static_cast<double>(images.size());
}

}  // namespace genbench
