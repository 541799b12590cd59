// Numerical verification of the local-convexity theory: coherence, the
// expected-Hessian eigenvalue lower bound, convexity radii, the traceless
// matrix eigenvalue intervals, curvature scans, and concentration tables.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "quadrec/core.hpp"
#include "quadrec/matrix.hpp"
#include "quadrec/measure.hpp"
#include "quadrec/objective.hpp"

namespace quadrec {

// tau(x) = max_k (v_k^T x)^2 / ||Sigma^{1/2} x||^2, v_k the columns of the
// symmetric square root of Sigma.
double coherence(const std::vector<double>& x, const Matrix& sigma);

// Whitened shortcut (Sigma = Id): max_k x_k^2 / ||x||^2, computed directly
// from coordinates.
double coherence_identity(const std::vector<double>& x);

// lambda_min(E[grad^2 f(x)]) >= 2 (1 + min{tau(x), 1/2} min{mu4 - 3, 0}) ||x||^2,
// whitened (Sigma = Id) model.
double lambda_min_bound(const std::vector<double>& x, double mu4);

enum class LambdaSource {
  analytic,  // exact lambda_min of the analytic expected Hessian at x
  bound,     // the mu4/tau lower bound (requires Sigma = Id)
};

struct ConvexityRegion {
  double lambda = 0.0;              // strong-convexity eigenvalue used below
  double expectation_radius = 0.0;  // ellipse of convexity of E[f]
  double finite_sample_radius = 0.0;   // lambda / (30 ||Sigma^{1/2} x||)
  double strong_convexity_constant = 0.0;  // lambda^2 / (12 ||Sigma^{1/2} x||^2)
};

ConvexityRegion convexity_region(const std::vector<double>& x, const Matrix& sigma, double mu4,
                                 LambdaSource source = LambdaSource::analytic);

struct TracelessCheck {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool bounds_ok = false;
};

// For unit u (coordinates sorted by decreasing square internally), checks the
// extreme eigenvalues of Z = u u^T - diag(u_k^2) against
// lambda_min in [-min{u_1^2, 1/2}, -u_2^2] and lambda_max in [0, 1 - u_n^2].
TracelessCheck traceless_eig_check(std::vector<double> u);

struct CurvatureSample {
  double t = 0.0;
  double fpp = 0.0;          // f''(t) along the aligned normal direction
  double lower_bound = 0.0;  // lambda_r^2 / (18 ||X||_F^2)
};

// Aligns u to the manifold, takes W_hat = (U - X O*)/||.||, and evaluates the
// curvature polynomial on the grid.
std::vector<CurvatureSample> curvature_scan(const QuadraticLoss& loss, const GroundTruth& truth,
                                            const Factor& u, const std::vector<double>& t_grid);

struct ConcentrationRow {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  double dev_init = 0.0;     // ||M - E[M]||_op
  double dev_hessian = 0.0;  // ||grad^2 f(X) - E[grad^2 f(X)]||_op (NaN if skipped)
};

// Operator-norm deviations of the init matrix and the Hessian at X from their
// expectations, for each m in m_list and `reps` independent draws. Supports
// the iid-coordinate ensembles (standard Gaussian, Bernoulli, sparse
// Gaussian); the Hessian column is filled only when nr <= 2000 and
// with_hessian is set.
std::vector<ConcentrationRow> concentration_check(const GroundTruth& truth,
                                                  const Ensemble& ensemble,
                                                  const std::vector<std::size_t>& m_list,
                                                  std::uint64_t seed, std::size_t reps = 10,
                                                  bool with_hessian = true);

// CSV: m,seed,dev_init,dev_hessian
void save_concentration_csv(const std::vector<ConcentrationRow>& rows, std::ostream& out);

}  // namespace quadrec
