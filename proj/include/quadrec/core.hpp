// Ground-truth factors and alignment to the solution manifold {XO : O in O(r)}.
// Everything that produces identical measurements differs from X by a right
// orthogonal action, so distances are always measured after a Procrustes fit.
#pragma once

#include <cstdint>
#include <vector>

#include "quadrec/matrix.hpp"

namespace quadrec {

struct GroundTruth {
  Factor x;                         // n-by-r, columns pairwise orthogonal
  std::vector<double> eigenvalues;  // lambda_1 >= ... >= lambda_r > 0 of XX^T
};

// Orthogonal-column factor with ||column_i||^2 = eigenvalues[i]; the column
// span is a uniformly random r-subspace. Eigenvalues must be given strictly
// positive and in descending order (the canonical column order).
GroundTruth make_ground_truth(std::size_t n, std::size_t r, std::vector<double> eigenvalues,
                              std::uint64_t seed);

struct AlignmentResult {
  Matrix o_star;       // r-by-r orthogonal, maximizes <XO, U>_F
  double distance_sq;  // d(U) = ||X o_star - U||_F^2
  Factor residual;     // U - X o_star
};

// Orthogonal Procrustes fit of U onto the manifold of X: O* = Z V^T from the
// SVD X^T U = Z D V^T. The minimizer need not be unique; any valid one is
// returned.
AlignmentResult procrustes_align(const Factor& x, const Factor& u);
AlignmentResult procrustes_align(const GroundTruth& truth, const Factor& u);

// d(U), the squared manifold distance.
double manifold_distance_sq(const Factor& x, const Factor& u);

// Descending nonzero eigenvalues of XX^T, computed as squared singular
// values of X.
std::vector<double> spectrum(const Factor& x);

}  // namespace quadrec
