// Spectral initialization and fixed-step gradient descent, plus the
// theory-side diagnostics: region membership, contraction-rate bracket,
// and geometric-rate fits of the iterate trace.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadrec/core.hpp"
#include "quadrec/objective.hpp"
#include "quadrec/stats.hpp"

namespace quadrec {

struct InitResult {
  Matrix m_matrix;             // M = (1/2m) sum y_i a_i a_i^T
  std::vector<double> sigmas;  // top r+1 eigenvalues of M, descending
  Factor u0;                   // Z Lambda^{1/2}, Lambda_i = max(sigma_i - sigma_{r+1}, 0)
  bool clamped = false;        // whether any Lambda_i was clamped at zero
};

InitResult spectral_init(const MeasurementSet& data, std::size_t r);

// Same eigenpair/scaling path on a caller-supplied init matrix (e.g. the
// population limit ||X||_F^2/2 Id + XX^T).
InitResult spectral_init_from_matrix(Matrix m, std::size_t r);

Matrix init_matrix(const MeasurementSet& data);
Matrix expected_init_matrix(const GroundTruth& truth);

struct DescentConfig {
  double gamma = 0.0;      // step size; must be > 0 when passed to descend
  std::size_t max_iters = 100000;
  double grad_tol = -1.0;  // < 0: use the default 1e-9 * max(1, f(U0))
  std::optional<double> dist_tol;  // stop when d(U) <= dist_tol (needs truth)
};

// gamma = 0.1 / (n * lambda1_hat) with lambda1_hat = sigma_1 - sigma_{r+1}
// from the init; empirical and overridable.
double default_step_size(const InitResult& init, std::size_t n);
DescentConfig default_descent_config(const QuadraticLoss& loss, const InitResult& init);

struct TracePoint {
  std::size_t iter;
  double f;
  double grad_norm;
  double dist;  // d(U_k) when truth known, NaN otherwise
};

struct Trace {
  std::vector<TracePoint> points;
  double contraction_estimate = 0.0;  // fitted per-iteration geometric factor
  double fit_r2 = 0.0;                // R^2 of the log-linear fit
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DescentResult {
  Factor u;
  Trace trace;
};

// Fixed-step gradient descent from u0. Stops on gradient norm, optional
// manifold distance (when truth given), or the iteration cap. Throws
// DivergenceError if f increases for 10 consecutive iterations.
DescentResult descend(const QuadraticLoss& loss, const Factor& u0, DescentConfig cfg,
                      const GroundTruth* truth = nullptr);

// Log-linear fit of d(U_k) (or f when no distance was logged) over the final
// fraction of the trace.
LineFit fit_trace_decay(const Trace& trace, double final_fraction = 2.0 / 3.0);

struct RegionReport {
  double d0 = 0.0;                  // d(U), squared manifold distance
  double closeness_radius = 0.0;    // 3 lambda_r / (10 ||X||_F)
  double init_bound = 0.0;          // 9 lambda_r^2 / (100 ||X||_F^2)
  bool in_region = false;           // d0 < init_bound
  double ell = 0.0;                 // lambda_r^2 / (18 ||X||_F^2)
  double empirical_lipschitz = 0.0; // max probe-pair gradient ratio B_hat
};

RegionReport region_report(const GroundTruth& truth, const Factor& u, const QuadraticLoss& loss);

struct RateBracket {
  double factor = 0.0;  // 1 - 2 gamma ell + gamma^2 b^2
  bool step_ok = false; // gamma < 2 ell / b^2
};

RateBracket rate_bracket(double ell, double b, double gamma);

// CSV: iter,f,grad_norm,dist
void save_trace_csv(const Trace& trace, std::ostream& out);
void save_trace_csv(const Trace& trace, const std::string& path);

// Flat key = value text block.
void save_region_report(const RegionReport& report, std::ostream& out);

}  // namespace quadrec
