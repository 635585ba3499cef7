#pragma once

// Distribution-level comparators: Frechet distance between Gaussian fits of
// two embedding sets (FID when the embeddings are Inception features) and the
// label-conditional CLIP score.

#include <cstddef>
#include <vector>

#include "genbench/embedstore.hpp"

namespace genbench {

struct GaussianStats {
  std::vector<double> mean;
  Matrix<double> covariance;  // unbiased, symmetric
  std::size_t count = 0;

  std::size_t dim() const noexcept { return mean.size(); }
};

/// Sample mean and (N-1)-normalized covariance. Needs at least two rows.
GaussianStats gaussian_stats(const EmbeddingSet& set);

/// ||mu_a - mu_b||^2 + Tr(C_a + C_b - 2 (C_a C_b)^{1/2}).
///
/// The trace of the square root is taken from the eigenvalues of the
/// symmetric product C_a^{1/2} C_b C_a^{1/2}. Eigenvalues in [-1e-6, 0) are
/// clamped to zero; anything more negative raises NumericalError.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

/// Mean cosine similarity between each image and its own class's text row.
double clip_score(const EmbeddingSet& images, const TextEmbeddings& text);

}  // namespace genbench
