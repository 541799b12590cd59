// The quadratic-measurement loss f(U) = (1/4m) sum_i (y_i - ||a_i^T U||^2)^2,
// its gradient and Hessian (matrix-free quadratic form and dense), the
// population Hessians, and the directional curvature polynomial.
//
// vec() convention, used everywhere a factor is flattened: column-stacking of
// the n-by-r matrix, columns in order k = 1..r, so Hessian block (k,l) sits at
// rows [k*n, (k+1)*n) x cols [l*n, (l+1)*n).
#pragma once

#include <vector>

#include "quadrec/core.hpp"
#include "quadrec/matrix.hpp"
#include "quadrec/measure.hpp"

namespace quadrec {

struct QuadraticLoss {
  MeasurementSet data;
  std::size_t n = 0;
  std::size_t r = 0;
};

QuadraticLoss make_loss(MeasurementSet data, std::size_t r);

double value(const QuadraticLoss& loss, const Factor& u);
Factor gradient(const QuadraticLoss& loss, const Factor& u);

// f and its gradient in one pass over the samples.
double value_and_gradient(const QuadraticLoss& loss, const Factor& u, Factor& grad_out);

// vec(W)^T grad^2 f(U) vec(W), matrix-free:
// (1/m) sum_i [ (a^T U U^T a - y) ||W^T a||^2 + 2 (a^T U W^T a)^2 ].
double hessian_quadform(const QuadraticLoss& loss, const Factor& u, const Factor& w);

// Explicit nr-by-nr symmetric Hessian; guarded at nr <= 2000.
// Block (k,l) = (1/m) sum_i [ 2(a^T u_k)(a^T u_l) + delta_kl (a^T U U^T a - y) ] a a^T.
Matrix hessian_dense(const QuadraticLoss& loss, const Factor& u);

// Population Hessian at U for ground truth X under standard Gaussian sensing:
// E[grad^2 f(U)] = A + D with
//   A_kl  = 2 u_k u_l^T + 2 u_l u_k^T + 2 (u_k^T u_l) Id
//   D_kk  = (||U||_F^2 - ||X||_F^2) Id + 2 (U U^T - X X^T).
Matrix expected_hessian_rank_r(const GroundTruth& truth, const Factor& u);

// Rank-one population Hessian for sub-gaussian sensing with covariance Sigma
// whose whitened coordinates are independent with fourth moment mu4:
// (3||S u||^2 - ||S x||^2) Sigma + Sigma (6 u u^T - 2 x x^T) Sigma
//   + (mu4 - 3) sum_k (3 (v_k^T u)^2 - (v_k^T x)^2) v_k v_k^T,
// S = Sigma^{1/2} (symmetric PSD root), v_k its columns.
Matrix expected_hessian_rank1(const std::vector<double>& u, const std::vector<double>& x,
                              const Matrix& sigma, double mu4);

// Second derivative of t -> f(X + t W_hat) on noiseless data, as a polynomial
// f''(t) = c2 t^2 + c1 t + c0 with
//   c2 = (3/m) sum A_i^2,  c1 = (6/m) sum A_i B_i,  c0 = (2/m) sum B_i^2,
//   A_i = ||W_hat^T a_i||^2,  B_i = <X^T a_i, W_hat^T a_i>.
struct CurvaturePolynomial {
  double c2 = 0.0, c1 = 0.0, c0 = 0.0;
  std::vector<std::pair<double, double>> per_sample_ab;  // (A_i, B_i)

  double operator()(double t) const { return (c2 * t + c1) * t + c0; }

  // |f''(t) - [3 mean((A t + B)^2) - mean(B^2)]|, should be ~0 identically.
  double identity_residual(double t) const;
};

// Requires ||w_hat||_F = 1 to 1e-8.
CurvaturePolynomial curvature_polynomial(const QuadraticLoss& loss, const GroundTruth& truth,
                                         const Factor& w_hat);

}  // namespace quadrec
