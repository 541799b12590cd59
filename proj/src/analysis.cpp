#include "quadrec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "quadrec/kernels.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/recover.hpp"
#include "quadrec/rng.hpp"
#include "quadrec/stats.hpp"

namespace quadrec {

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit fit;
  const std::size_t n = xs.size();
  if (n != ys.size()) throw std::invalid_argument("fit_line: length mismatch");
  if (n == 0) return fit;
  if (n <= 2) {
    fit.r_squared = 1.0;
    if (n == 2 && xs[1] != xs[0]) {
      fit.slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
      fit.intercept = ys[0] - fit.slope * xs[0];
    } else {
      fit.intercept = ys[0];
    }
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double coherence_identity(const std::vector<double>& x) {
  const double nrm2 = kernels::sum_sq(x.data(), x.size());
  if (nrm2 == 0.0) throw std::invalid_argument("coherence: zero vector");
  double num = 0.0;
  for (double v : x) num = std::max(num, v * v);
  return num / nrm2;
}

namespace {

bool is_exact_identity(const Matrix& a) {
  if (a.rows != a.cols) return false;
  for (std::size_t j = 0; j < a.cols; ++j)
    for (std::size_t i = 0; i < a.rows; ++i)
      if (a(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

}  // namespace

double coherence(const std::vector<double>& x, const Matrix& sigma) {
  if (sigma.rows != x.size() || sigma.cols != x.size())
    throw std::invalid_argument("coherence: shape mismatch");
  if (is_exact_identity(sigma)) return coherence_identity(x);
  const Matrix root = sym_sqrt(sigma);
  const std::vector<double> w = matvec(root, x);  // (v_k^T x)_k by symmetry of the root
  return coherence_identity(w);
}

double lambda_min_bound(const std::vector<double>& x, double mu4) {
  const double tau = coherence_identity(x);
  const double nrm2 = kernels::sum_sq(x.data(), x.size());
  return 2.0 * (1.0 + std::min(tau, 0.5) * std::min(mu4 - 3.0, 0.0)) * nrm2;
}

ConvexityRegion convexity_region(const std::vector<double>& x, const Matrix& sigma, double mu4,
                                 LambdaSource source) {
  const std::size_t n = x.size();
  if (sigma.rows != n || sigma.cols != n) throw std::invalid_argument("convexity_region: shape mismatch");
  const bool ident = is_exact_identity(sigma);

  double sxn2;  // ||Sigma^{1/2} x||^2 = x^T Sigma x
  if (ident) {
    sxn2 = kernels::sum_sq(x.data(), n);
  } else {
    const std::vector<double> sx = matvec(sigma, x);
    sxn2 = kernels::dot(x.data(), sx.data(), n);
  }
  if (sxn2 == 0.0) throw std::invalid_argument("convexity_region: zero vector");
  const double sxn = std::sqrt(sxn2);

  ConvexityRegion region;
  if (source == LambdaSource::bound) {
    if (!ident)
      throw std::invalid_argument("convexity_region: bound path requires identity covariance");
    region.lambda = lambda_min_bound(x, mu4);
  } else {
    const std::vector<double> halves = sym_eigvals(expected_hessian_rank1(x, x, sigma, mu4));
    region.lambda = halves.back();
  }

  const double tau = ident ? coherence_identity(x) : coherence(x, sigma);
  const double neg = std::min(mu4 - 3.0, 0.0);
  const double pos = std::max(mu4 - 3.0, 0.0);
  region.expectation_radius =
      (1.0 / 3.0) * ((1.0 + std::min(tau, 0.5) * neg) / (3.0 + tau * pos)) * sxn;
  region.finite_sample_radius = region.lambda / (30.0 * sxn);
  region.strong_convexity_constant = region.lambda * region.lambda / (12.0 * sxn2);
  return region;
}

TracelessCheck traceless_eig_check(std::vector<double> u) {
  const std::size_t n = u.size();
  const double nrm = std::sqrt(kernels::sum_sq(u.data(), n));
  if (std::fabs(nrm - 1.0) > 1e-8) throw std::invalid_argument("traceless_eig_check: need a unit vector");
  std::sort(u.begin(), u.end(), [](double a, double b) { return a * a > b * b; });

  Matrix z(n, n);
  kernels::syr(1.0, u.data(), n, z.data.data());
  for (std::size_t k = 0; k < n; ++k) z(k, k) -= u[k] * u[k];

  const std::vector<double> eig = sym_eigvals(z);
  TracelessCheck check;
  check.lambda_max = eig.front();
  check.lambda_min = eig.back();

  const double u1sq = u[0] * u[0];
  const double u2sq = n > 1 ? u[1] * u[1] : 0.0;
  const double unsq = u[n - 1] * u[n - 1];
  const double tol = 1e-12;
  check.bounds_ok = check.lambda_min >= -std::min(u1sq, 0.5) - tol &&
                    check.lambda_min <= -u2sq + tol && check.lambda_max >= -tol &&
                    check.lambda_max <= 1.0 - unsq + tol;
  return check;
}

std::vector<CurvatureSample> curvature_scan(const QuadraticLoss& loss, const GroundTruth& truth,
                                            const Factor& u, const std::vector<double>& t_grid) {
  const AlignmentResult align = procrustes_align(truth, u);
  const double norm = std::sqrt(align.distance_sq);
  if (norm < 1e-14) throw std::invalid_argument("curvature_scan: u lies on the solution manifold");
  Factor w_hat = align.residual;
  scale(w_hat, 1.0 / norm);

  const CurvaturePolynomial poly = curvature_polynomial(loss, truth, w_hat);
  double xf2 = 0.0;
  for (double lam : truth.eigenvalues) xf2 += lam;
  const double lam_r = truth.eigenvalues.back();
  const double bound = lam_r * lam_r / (18.0 * xf2);

  std::vector<CurvatureSample> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) rows.push_back(CurvatureSample{t, poly(t), bound});
  return rows;
}

namespace {

double ensemble_mu4(const Ensemble& ensemble) {
  switch (ensemble.kind) {
    case Ensemble::Kind::standard_gaussian: return 3.0;
    case Ensemble::Kind::bernoulli: return 1.0;
    case Ensemble::Kind::sparse_gaussian: return 3.0 / ensemble.sparse_p;
    default:
      throw std::invalid_argument("concentration_check: ensemble must have iid unit coordinates");
  }
}

// E[grad^2 f(X)] for iid-coordinate ensembles: block (k,l) of the Gaussian
// A-matrix plus the (mu4 - 3) diagonal correction; D vanishes at X.
Matrix expected_hessian_at_x(const GroundTruth& truth, double mu4) {
  const std::size_t n = truth.x.rows, r = truth.x.cols;
  Matrix h = expected_hessian_rank_r(truth, truth.x);
  if (mu4 != 3.0) {
    for (std::size_t l = 0; l < r; ++l)
      for (std::size_t k = 0; k < r; ++k)
        for (std::size_t j = 0; j < n; ++j)
          h(k * n + j, l * n + j) += 2.0 * (mu4 - 3.0) * truth.x(j, k) * truth.x(j, l);
  }
  return h;
}

// E[M] = (1/2)(||X||_F^2 Id + 2 XX^T + (mu4 - 3) sum_k diag(x_k^2)).
Matrix expected_init_matrix_mu4(const GroundTruth& truth, double mu4) {
  const std::size_t n = truth.x.rows;
  Matrix mat = expected_init_matrix(truth);
  if (mu4 != 3.0) {
    for (std::size_t k = 0; k < truth.x.cols; ++k)
      for (std::size_t j = 0; j < n; ++j)
        mat(j, j) += 0.5 * (mu4 - 3.0) * truth.x(j, k) * truth.x(j, k);
  }
  return mat;
}

}  // namespace

std::vector<ConcentrationRow> concentration_check(const GroundTruth& truth,
                                                  const Ensemble& ensemble,
                                                  const std::vector<std::size_t>& m_list,
                                                  std::uint64_t seed, std::size_t reps,
                                                  bool with_hessian) {
  const std::size_t n = truth.x.rows, r = truth.x.cols;
  if (ensemble.n != n) throw std::invalid_argument("concentration_check: dimension mismatch");
  const double mu4 = ensemble_mu4(ensemble);
  const Matrix init_expect = expected_init_matrix_mu4(truth, mu4);
  const bool do_hessian = with_hessian && n * r <= 2000;
  Matrix hessian_expect;
  if (do_hessian) hessian_expect = expected_hessian_at_x(truth, mu4);

  std::vector<ConcentrationRow> rows;
  for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::uint64_t draw_seed = mix_seed(seed, mi * reps + rep);
      const Matrix vectors = draw(ensemble, m_list[mi], draw_seed);
      const MeasurementSet data = measure_set(truth.x, vectors);

      ConcentrationRow row;
      row.m = m_list[mi];
      row.seed = draw_seed;
      row.dev_init = operator_norm_sym(sub(init_matrix(data), init_expect));
      if (do_hessian) {
        const QuadraticLoss loss = make_loss(data, r);
        row.dev_hessian = operator_norm_sym(sub(hessian_dense(loss, truth.x), hessian_expect));
      } else {
        row.dev_hessian = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void save_concentration_csv(const std::vector<ConcentrationRow>& rows, std::ostream& out) {
  out << "m,seed,dev_init,dev_hessian\n";
  char buf[40];
  for (const ConcentrationRow& row : rows) {
    out << row.m << "," << row.seed;
    for (double v : {row.dev_init, row.dev_hessian}) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace quadrec
