#include "quadrec/recover.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "quadrec/kernels.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/rng.hpp"

namespace quadrec {

Matrix init_matrix(const MeasurementSet& data) {
  const std::size_t m = data.m(), n = data.n();
  Matrix mat(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    kernels::syr(data.values[i], data.vectors.col(i), n, mat.data.data());
  }
  scale(mat, 1.0 / (2.0 * static_cast<double>(m)));
  return mat;
}

Matrix expected_init_matrix(const GroundTruth& truth) {
  const std::size_t n = truth.x.rows;
  double xf2 = 0.0;
  for (double lam : truth.eigenvalues) xf2 += lam;
  Matrix mat(n, n);
  for (std::size_t i = 0; i < n; ++i) mat(i, i) = 0.5 * xf2;
  for (std::size_t k = 0; k < truth.x.cols; ++k) kernels::syr(1.0, truth.x.col(k), n, mat.data.data());
  return mat;
}

InitResult spectral_init_from_matrix(Matrix m, std::size_t r) {
  const std::size_t n = m.rows;
  if (r + 1 > n) throw std::invalid_argument("spectral_init: need r + 1 <= n");
  SymEig eig = sym_eig(m);

  InitResult out;
  out.m_matrix = std::move(m);
  out.sigmas.assign(eig.values.begin(), eig.values.begin() + static_cast<long>(r + 1));

  const double sigma_next = out.sigmas[r];
  Factor u0(n, r);
  for (std::size_t k = 0; k < r; ++k) {
    double lam = out.sigmas[k] - sigma_next;
    if (lam < 0.0) {
      lam = 0.0;
      out.clamped = true;
    }
    const double s = std::sqrt(lam);
    for (std::size_t i = 0; i < n; ++i) u0(i, k) = s * eig.vectors(i, k);
  }
  out.u0 = std::move(u0);
  return out;
}

InitResult spectral_init(const MeasurementSet& data, std::size_t r) {
  if (data.m() < r + 1) throw std::invalid_argument("spectral_init: need m >= r + 1");
  for (double y : data.values)
    if (!std::isfinite(y)) throw std::invalid_argument("spectral_init: non-finite measurement");
  return spectral_init_from_matrix(init_matrix(data), r);
}

double default_step_size(const InitResult& init, std::size_t n) {
  const double lam1 = init.sigmas.front() - init.sigmas.back();
  const double denom = lam1 > 0.0 ? static_cast<double>(n) * lam1 : static_cast<double>(n);
  return 0.1 / denom;
}

DescentConfig default_descent_config(const QuadraticLoss& loss, const InitResult& init) {
  DescentConfig cfg;
  cfg.gamma = default_step_size(init, loss.n);
  cfg.grad_tol = 1e-9 * std::max(1.0, value(loss, init.u0));
  cfg.max_iters = 100000;
  return cfg;
}

namespace {

double trace_distance(const GroundTruth* truth, const Factor& u) {
  if (truth == nullptr) return std::numeric_limits<double>::quiet_NaN();
  return procrustes_align(*truth, u).distance_sq;
}

}  // namespace

DescentResult descend(const QuadraticLoss& loss, const Factor& u0, DescentConfig cfg,
                      const GroundTruth* truth) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("descend: gamma must be > 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("descend: max_iters must be >= 1");
  if (u0.rows != loss.n || u0.cols != loss.r) throw std::invalid_argument("descend: u0 shape mismatch");

  Factor u = u0;
  Factor grad;
  double f = value_and_gradient(loss, u, grad);
  if (cfg.grad_tol < 0.0) cfg.grad_tol = 1e-9 * std::max(1.0, f);

  Trace trace;
  trace.points.reserve(std::min<std::size_t>(cfg.max_iters + 1, 1 << 20));

  double prev_f = f;
  std::size_t rising = 0;
  for (std::size_t iter = 0;; ++iter) {
    const double grad_norm = frobenius(grad);
    const double dist = trace_distance(truth, u);
    trace.points.push_back(TracePoint{iter, f, grad_norm, dist});

    if (grad_norm <= cfg.grad_tol) break;
    if (cfg.dist_tol && !std::isnan(dist) && dist <= *cfg.dist_tol) break;
    if (iter >= cfg.max_iters) break;

    add_scaled(u, -cfg.gamma, grad);
    f = value_and_gradient(loss, u, grad);

    if (!std::isfinite(f)) {
      std::ostringstream msg;
      msg << "gradient descent diverged: loss became non-finite (gamma = " << cfg.gamma
          << ", iter = " << iter + 1 << ")";
      throw DivergenceError(msg.str());
    }
    if (f > prev_f) {
      if (++rising >= 10) {
        std::ostringstream msg;
        msg << "gradient descent diverged: f increased for 10 consecutive iterations"
            << " (gamma = " << cfg.gamma << ", iter = " << iter + 1 << ")";
        throw DivergenceError(msg.str());
      }
    } else {
      rising = 0;
    }
    prev_f = f;
  }

  const LineFit fit = fit_trace_decay(trace);
  trace.contraction_estimate = std::exp(fit.slope);
  trace.fit_r2 = fit.r_squared;
  return DescentResult{std::move(u), std::move(trace)};
}

LineFit fit_trace_decay(const Trace& trace, double final_fraction) {
  std::vector<double> xs, ys;
  const bool have_dist = !trace.points.empty() && !std::isnan(trace.points.front().dist);
  for (const TracePoint& p : trace.points) {
    const double v = have_dist ? p.dist : p.f;
    if (v > 0.0 && std::isfinite(v)) {
      xs.push_back(static_cast<double>(p.iter));
      ys.push_back(std::log(v));
    }
  }
  const std::size_t skip = static_cast<std::size_t>(
      static_cast<double>(xs.size()) * (1.0 - final_fraction));
  xs.erase(xs.begin(), xs.begin() + static_cast<long>(skip));
  ys.erase(ys.begin(), ys.begin() + static_cast<long>(skip));
  return fit_line(xs, ys);
}

RegionReport region_report(const GroundTruth& truth, const Factor& u, const QuadraticLoss& loss) {
  RegionReport rep;
  rep.d0 = procrustes_align(truth, u).distance_sq;

  double xf2 = 0.0;
  for (double lam : truth.eigenvalues) xf2 += lam;
  const double lam_r = truth.eigenvalues.back();
  rep.closeness_radius = 3.0 * lam_r / (10.0 * std::sqrt(xf2));
  rep.init_bound = 9.0 * lam_r * lam_r / (100.0 * xf2);
  rep.in_region = rep.d0 < rep.init_bound;
  rep.ell = lam_r * lam_r / (18.0 * xf2);

  // Empirical Lipschitz estimate over probe points inside the region; the
  // theoretical constant is unspecified, so this stands in for it.
  const std::size_t n = truth.x.rows, r = truth.x.cols;
  std::vector<Factor> probes;
  Rng rng(0x51ab5ULL + n * 131 + r);
  const double radius = std::sqrt(rep.init_bound);
  for (double frac : {0.2, 0.45, 0.7, 0.95}) {
    Factor dir(n, r);
    for (double& v : dir.data) v = rng.gaussian();
    scale(dir, frac * radius / frobenius(dir));
    Factor probe = truth.x;
    add_scaled(probe, 1.0, dir);
    probes.push_back(std::move(probe));
  }
  probes.push_back(truth.x);
  if (rep.in_region) probes.push_back(u);

  std::vector<Factor> grads;
  grads.reserve(probes.size());
  for (const Factor& p : probes) grads.push_back(gradient(loss, p));

  double b_hat = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    for (std::size_t j = i + 1; j < probes.size(); ++j) {
      const double du = frobenius(sub(probes[i], probes[j]));
      if (du < 1e-14) continue;
      const double dg = frobenius(sub(grads[i], grads[j]));
      b_hat = std::max(b_hat, dg / du);
    }
  }
  rep.empirical_lipschitz = b_hat;
  return rep;
}

RateBracket rate_bracket(double ell, double b, double gamma) {
  if (!(ell > 0.0) || !(b > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("rate_bracket: ell, b, gamma must be > 0");
  RateBracket out;
  out.factor = 1.0 - 2.0 * gamma * ell + gamma * gamma * b * b;
  out.step_ok = gamma < 2.0 * ell / (b * b);
  return out;
}

void save_trace_csv(const Trace& trace, std::ostream& out) {
  out << "iter,f,grad_norm,dist\n";
  char buf[40];
  for (const TracePoint& p : trace.points) {
    out << p.iter;
    for (double v : {p.f, p.grad_norm, p.dist}) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

void save_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_trace_csv(trace, out);
}

void save_region_report(const RegionReport& report, std::ostream& out) {
  char buf[40];
  const auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << " = " << buf << "\n";
  };
  put("d0", report.d0);
  put("closeness_radius", report.closeness_radius);
  put("init_bound", report.init_bound);
  out << "in_region = " << (report.in_region ? "true" : "false") << "\n";
  put("ell", report.ell);
  put("empirical_lipschitz", report.empirical_lipschitz);
}

}  // namespace quadrec
