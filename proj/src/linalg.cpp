#include "quadrec/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace quadrec {

namespace {

using EMat = Eigen::MatrixXd;
using EMap = Eigen::Map<const EMat>;

EMap as_eigen(const Matrix& a) {
  return EMap(a.data.data(), static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
}

Matrix from_eigen(const EMat& e) {
  Matrix a(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  EMat::Map(a.data.data(), e.rows(), e.cols()) = e;
  return a;
}

void require_square(const Matrix& a, const char* who) {
  if (a.rows != a.cols) throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

}  // namespace

SymEig sym_eig(const Matrix& a) {
  require_square(a, "sym_eig");
  if (!a.is_finite()) throw NumericalError("sym_eig: non-finite input");
  Eigen::SelfAdjointEigenSolver<EMat> es(as_eigen(a));
  if (es.info() != Eigen::Success) throw NumericalError("sym_eig: eigensolver failed");
  const std::size_t n = a.rows;
  SymEig out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  // Eigen returns ascending order; flip to descending.
  for (std::size_t k = 0; k < n; ++k) {
    const auto src = static_cast<Eigen::Index>(n - 1 - k);
    out.values[k] = es.eigenvalues()(src);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = es.eigenvectors()(static_cast<Eigen::Index>(i), src);
  }
  return out;
}

std::vector<double> sym_eigvals(const Matrix& a) {
  require_square(a, "sym_eigvals");
  if (!a.is_finite()) throw NumericalError("sym_eigvals: non-finite input");
  Eigen::SelfAdjointEigenSolver<EMat> es(as_eigen(a), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("sym_eigvals: eigensolver failed");
  std::vector<double> vals(a.rows);
  for (std::size_t k = 0; k < a.rows; ++k) vals[k] = es.eigenvalues()(static_cast<Eigen::Index>(a.rows - 1 - k));
  return vals;
}

Svd svd(const Matrix& a) {
  if (!a.is_finite()) throw NumericalError("svd: non-finite input");
  Eigen::JacobiSVD<EMat> solver(as_eigen(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out;
  out.u = from_eigen(solver.matrixU());
  out.v = from_eigen(solver.matrixV());
  out.singular_values.assign(solver.singularValues().data(),
                             solver.singularValues().data() + solver.singularValues().size());
  return out;
}

std::vector<double> singular_values(const Matrix& a) {
  if (!a.is_finite()) throw NumericalError("singular_values: non-finite input");
  Eigen::JacobiSVD<EMat> solver(as_eigen(a));
  return std::vector<double>(solver.singularValues().data(),
                             solver.singularValues().data() + solver.singularValues().size());
}

Matrix orthonormalize(const Matrix& a) {
  if (a.rows < a.cols) throw std::invalid_argument("orthonormalize: need rows >= cols");
  Eigen::HouseholderQR<EMat> qr(as_eigen(a));
  EMat q = qr.householderQ() * EMat::Identity(static_cast<Eigen::Index>(a.rows), static_cast<Eigen::Index>(a.cols));
  return from_eigen(q);
}

Matrix cholesky(const Matrix& spd) {
  require_square(spd, "cholesky");
  Eigen::LLT<EMat> llt(as_eigen(spd));
  if (llt.info() != Eigen::Success) throw NumericalError("cholesky: matrix is not positive definite");
  return from_eigen(EMat(llt.matrixL()));
}

Matrix sym_sqrt(const Matrix& psd) {
  SymEig es = sym_eig(psd);
  const double scale = es.values.empty() ? 0.0 : std::fabs(es.values.front());
  Matrix root(psd.rows, psd.cols);
  for (std::size_t k = 0; k < psd.rows; ++k) {
    double lam = es.values[k];
    if (lam < 0.0) {
      if (lam < -1e-10 * std::max(1.0, scale)) throw NumericalError("sym_sqrt: matrix is not PSD");
      lam = 0.0;
    }
    const double s = std::sqrt(lam);
    // root += s * v_k v_k^T
    for (std::size_t j = 0; j < psd.cols; ++j) {
      const double c = s * es.vectors(j, k);
      for (std::size_t i = 0; i < psd.rows; ++i) root(i, j) += c * es.vectors(i, k);
    }
  }
  return root;
}

Matrix sym_sqrt_inv(const Matrix& spd) {
  SymEig es = sym_eig(spd);
  const double scale = es.values.empty() ? 0.0 : std::fabs(es.values.front());
  Matrix root(spd.rows, spd.cols);
  for (std::size_t k = 0; k < spd.rows; ++k) {
    const double lam = es.values[k];
    if (lam <= 1e-14 * std::max(1.0, scale)) throw NumericalError("sym_sqrt_inv: matrix is not positive definite");
    const double s = 1.0 / std::sqrt(lam);
    for (std::size_t j = 0; j < spd.cols; ++j) {
      const double c = s * es.vectors(j, k);
      for (std::size_t i = 0; i < spd.rows; ++i) root(i, j) += c * es.vectors(i, k);
    }
  }
  return root;
}

double operator_norm_sym(const Matrix& a) {
  auto vals = sym_eigvals(a);
  double m = 0.0;
  for (double v : vals) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace quadrec
