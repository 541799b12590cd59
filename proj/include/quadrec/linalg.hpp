// Thin interface over the dense decompositions the library needs
// (symmetric eigendecomposition, SVD, QR orthonormalization, Cholesky).
// Backed by Eigen; nothing outside linalg.cpp touches Eigen directly.
#pragma once

#include <stdexcept>
#include <vector>

#include "quadrec/matrix.hpp"

namespace quadrec {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SymEig {
  std::vector<double> values;  // descending
  Matrix vectors;              // column k pairs with values[k]
};

// Full eigendecomposition of a symmetric matrix (uses the lower triangle).
SymEig sym_eig(const Matrix& a);

// Eigenvalues only, descending.
std::vector<double> sym_eigvals(const Matrix& a);

struct Svd {
  Matrix u;
  std::vector<double> singular_values;  // descending
  Matrix v;
};

Svd svd(const Matrix& a);
std::vector<double> singular_values(const Matrix& a);

// Thin Q factor of a (rows >= cols), columns orthonormal.
Matrix orthonormalize(const Matrix& a);

// Lower Cholesky factor of an SPD matrix; throws NumericalError otherwise.
Matrix cholesky(const Matrix& spd);

// Symmetric PSD square root via eigendecomposition (negative eigenvalues
// within -1e-10 are clamped to zero; worse is an error).
Matrix sym_sqrt(const Matrix& psd);
Matrix sym_sqrt_inv(const Matrix& spd);

// Operator (spectral) norm of a symmetric matrix: max |eigenvalue|.
double operator_norm_sym(const Matrix& a);

}  // namespace quadrec
