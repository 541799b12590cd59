#include "quadrec/core.hpp"

#include <cmath>
#include <stdexcept>

#include "quadrec/kernels.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/rng.hpp"

namespace quadrec {

GroundTruth make_ground_truth(std::size_t n, std::size_t r, std::vector<double> eigenvalues,
                              std::uint64_t seed) {
  if (r < 1 || n < r) throw std::invalid_argument("make_ground_truth: need n >= r >= 1");
  if (eigenvalues.size() != r) throw std::invalid_argument("make_ground_truth: need r eigenvalues");
  for (std::size_t i = 0; i < r; ++i) {
    if (!(eigenvalues[i] > 0.0)) throw std::invalid_argument("make_ground_truth: eigenvalues must be positive");
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
      throw std::invalid_argument("make_ground_truth: eigenvalues must be descending");
  }

  Rng rng(seed);
  Matrix g(n, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < n; ++i) g(i, j) = rng.gaussian();

  Factor x = orthonormalize(g);
  for (std::size_t j = 0; j < r; ++j) kernels::scal(std::sqrt(eigenvalues[j]), x.col(j), n);
  return GroundTruth{std::move(x), std::move(eigenvalues)};
}

AlignmentResult procrustes_align(const Factor& x, const Factor& u) {
  if (x.rows != u.rows || x.cols != u.cols)
    throw std::invalid_argument("procrustes_align: dimension mismatch");
  if (!x.is_finite() || !u.is_finite()) throw NumericalError("procrustes_align: non-finite input");

  const Matrix xtu = matmul_at_b(x, u);  // r-by-r
  const Svd dec = svd(xtu);
  Matrix o_star = matmul(dec.u, transpose(dec.v));  // Z V^T

  Factor residual = sub(u, matmul(x, o_star));
  const double dist = frobenius_sq(residual);
  return AlignmentResult{std::move(o_star), dist, std::move(residual)};
}

AlignmentResult procrustes_align(const GroundTruth& truth, const Factor& u) {
  return procrustes_align(truth.x, u);
}

double manifold_distance_sq(const Factor& x, const Factor& u) {
  return procrustes_align(x, u).distance_sq;
}

std::vector<double> spectrum(const Factor& x) {
  if (!x.is_finite()) throw NumericalError("spectrum: non-finite input");
  std::vector<double> s = singular_values(x);
  for (double& v : s) v = v * v;
  return s;
}

}  // namespace quadrec
