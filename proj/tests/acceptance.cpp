// Acceptance suite: one check per criterion, each printed as a PASS/FAIL line
// with the measured values and its runtime. Exit status is the number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "quadrec/analysis.hpp"
#include "quadrec/bench.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/objective.hpp"
#include "quadrec/phase.hpp"
#include "quadrec/recover.hpp"
#include "quadrec/rng.hpp"
#include "quadrec/stats.hpp"

using namespace quadrec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // criterion runtime limit
  std::function<Outcome()> run;
};

struct Instance {
  GroundTruth truth;
  QuadraticLoss loss;
};

Instance random_instance(std::size_t n, std::size_t r, std::size_t m, std::uint64_t seed) {
  std::vector<double> eigs(r);
  for (std::size_t k = 0; k < r; ++k) eigs[k] = 1.0 / static_cast<double>(k + 1);
  GroundTruth truth = make_ground_truth(n, r, eigs, seed);
  MeasurementSet data = measure_set(truth.x, draw(Ensemble::standard_gaussian(n), m, seed + 1));
  return {std::move(truth), make_loss(std::move(data), r)};
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return std::string(buf);
}

// ---- criterion bodies -----------------------------------------------------

Outcome gradient_correctness() {
  double worst = 0.0;
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const std::size_t r = 1 + trial % 3;
    const Instance inst = random_instance(n, r, 4 * n * r, 3000 + trial);
    const Factor u = oracles::random_factor(n, r, rng);
    const Factor g = gradient(inst.loss, u);
    const Factor g_fd = oracles::fd_gradient(inst.loss, u, 1e-5);
    worst = std::max(worst, frobenius(sub(g, g_fd)) / std::max(frobenius(g_fd), 1e-12));
  }
  return {worst <= 1e-6, fmt("max rel err %.3g (tol 1e-6, 50 instances)", worst)};
}

Outcome hessian_correctness() {
  double worst_fd = 0.0, worst_consistency = 0.0, worst_sym = 0.0;
  Rng rng(102);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + trial % 9;
    const std::size_t r = 1 + trial % 3;
    const Instance inst = random_instance(n, r, 4 * n * r, 4000 + trial);
    const Factor u = oracles::random_factor(n, r, rng);
    Factor w = oracles::random_factor(n, r, rng);
    scale(w, 1.0 / frobenius(w));
    const double quad = hessian_quadform(inst.loss, u, w);
    const double quad_fd = oracles::fd_quadform(inst.loss, u, w, 1e-4);
    worst_fd = std::max(worst_fd, std::fabs(quad - quad_fd) / std::max(std::fabs(quad_fd), 1e-10));

    if (trial < 8) {
      const Matrix h = hessian_dense(inst.loss, u);
      worst_sym = std::max(worst_sym, max_abs_diff(h, transpose(h)));
      for (int probe = 0; probe < 5; ++probe) {
        const Factor wp = oracles::random_factor(n, r, rng);
        const std::vector<double> wv(wp.data);
        const std::vector<double> hw = matvec(h, wv);
        double via_dense = 0.0;
        for (std::size_t i = 0; i < wv.size(); ++i) via_dense += wv[i] * hw[i];
        const double via_quad = hessian_quadform(inst.loss, u, wp);
        worst_consistency = std::max(
            worst_consistency, std::fabs(via_dense - via_quad) / std::max(std::fabs(via_quad), 1.0));
      }
    }
  }
  const bool pass = worst_fd <= 1e-4 && worst_consistency <= 1e-10 && worst_sym == 0.0;
  return {pass, fmt("fd rel %.3g (tol 1e-4), dense-vs-quadform %.3g (tol 1e-10), asym %.3g",
                    worst_fd, worst_consistency, worst_sym)};
}

Outcome expected_hessian_formulas() {
  // rank-r at benchmark scale
  const GroundTruth truth = make_ground_truth(6, 2, {0.6, 0.4}, 5001);
  Rng rng(103);
  Factor u = truth.x;
  Factor dir = oracles::random_factor(6, 2, rng);
  scale(dir, 0.25 / frobenius(dir));
  add_scaled(u, 1.0, dir);
  const MeasurementSet data =
      measure_set(truth.x, draw(Ensemble::standard_gaussian(6), 200000, 5002));
  const double gap_r = operator_norm_sym(sub(hessian_dense(make_loss(data, 2), u),
                                             expected_hessian_rank_r(truth, u))) /
                       operator_norm_sym(expected_hessian_rank_r(truth, u));

  // rank-1 against the three ensembles
  double gap_1 = 0.0;
  std::size_t which = 0;
  for (const Ensemble& ens : {Ensemble::bernoulli(5), Ensemble::standard_gaussian(5),
                              Ensemble::sparse_gaussian(5, 0.5)}) {
    const double mu4 = ens.kind == Ensemble::Kind::bernoulli
                           ? 1.0
                           : (ens.kind == Ensemble::Kind::sparse_gaussian ? 6.0 : 3.0);
    Rng trial_rng(104 + which);
    const auto x = oracles::random_unit_vector(5, trial_rng);
    std::vector<double> uv(5);
    for (std::size_t i = 0; i < 5; ++i) uv[i] = x[i] + 0.3 * trial_rng.gaussian();

    Factor xf(5, 1), uf(5, 1);
    std::copy(x.begin(), x.end(), xf.data.begin());
    std::copy(uv.begin(), uv.end(), uf.data.begin());
    const MeasurementSet d1 = measure_set(xf, draw(ens, 1000000, 5100 + which));
    const Matrix expected = expected_hessian_rank1(uv, x, ens.covariance(), mu4);
    gap_1 = std::max(gap_1, operator_norm_sym(sub(hessian_dense(make_loss(d1, 1), uf), expected)) /
                                operator_norm_sym(expected));
    ++which;
  }
  const bool pass = gap_r <= 0.05 && gap_1 <= 0.05;
  return {pass, fmt("rank-r gap %.3g, worst rank-1 gap %.3g (tol 0.05)", gap_r, gap_1)};
}

Outcome bernoulli_sharpness() {
  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<double> x{s, s};
  const double lam_min = sym_eigvals(expected_hessian_rank1(x, x, Matrix::identity(2), 1.0)).back();
  const double bound = lambda_min_bound(x, 1.0);
  const bool pass = std::fabs(lam_min) <= 1e-10 && bound == 0.0;
  return {pass, fmt("lambda_min %.3g (tol 1e-10), bound %.17g (must be exactly 0)", lam_min, bound)};
}

Outcome gaussian_constants() {
  std::vector<double> e1(4, 0.0);
  e1[0] = 1.0;
  const ConvexityRegion region =
      convexity_region(e1, Matrix::identity(4), 3.0, LambdaSource::bound);
  const ConvexityRegion analytic =
      convexity_region(e1, Matrix::identity(4), 3.0, LambdaSource::analytic);
  const bool exact =
      region.finite_sample_radius == 1.0 / 15.0 && region.strong_convexity_constant == 1.0 / 3.0;
  const bool agree = std::fabs(analytic.finite_sample_radius - 1.0 / 15.0) <= 1e-12 &&
                     std::fabs(analytic.strong_convexity_constant - 1.0 / 3.0) <= 1e-12;
  return {exact && agree,
          fmt("radius %.17g (= 1/15 exactly: %g), constant %.17g", region.finite_sample_radius,
              exact ? 1.0 : 0.0, region.strong_convexity_constant)};
}

Outcome traceless_sweep() {
  std::size_t violations = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    const std::size_t n = 2 + i % 9;
    Rng rng(777, i);
    const auto u = oracles::random_unit_vector(n, rng);
    if (!traceless_eig_check(u).bounds_ok) ++violations;
  }
  return {violations == 0, fmt("%g violations in 1e4 sweeps (n in 2..10)",
                               static_cast<double>(violations))};
}

ExperimentConfig transition_config(ExperimentKind kind, std::size_t n, std::size_t r,
                                   std::vector<std::size_t> m_grid, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.n = n;
  cfg.r = r;
  cfg.m_grid = std::move(m_grid);
  cfg.trials = 50;
  cfg.seed = seed;
  cfg.success_tol = 1e-3;
  cfg.max_iters = 20000;
  return cfg;
}

Outcome phase_transition_rank1() {
  const ExperimentConfig cfg = transition_config(
      ExperimentKind::phase_transition_r1, 100, 1, {200, 300, 400, 500, 600, 700, 800}, 42);
  const ExperimentResult result = run_phase_transition(cfg);
  const double lo = result.rows.front().success_rate;
  const double hi = result.rows.back().success_rate;
  bool monotone = true;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].success_rate < result.rows[i - 1].success_rate - 0.05) monotone = false;
  }
  std::ostringstream rates;
  for (const auto& row : result.rows) rates << " " << row.success_rate;
  const bool pass = hi >= 0.9 && lo <= 0.3 && monotone;
  return {pass, "rates(m=2n..8n):" + rates.str() +
                    fmt(" | need >=0.9 at 8n, <=0.3 at 2n, monotone within 0.05 (%g/%g)", lo, hi)};
}

Outcome rank5_recovery() {
  const ExperimentConfig cfg =
      transition_config(ExperimentKind::phase_transition_r5, 20, 5, {500}, 43);
  const ExperimentResult result = run_phase_transition(cfg);
  const double rate = result.rows.front().success_rate;
  return {rate >= 0.9, fmt("success rate %.3g at m=25n over 50 trials (need >= 0.9)", rate)};
}

Outcome noise_robustness() {
  ExperimentConfig cfg = transition_config(ExperimentKind::noise, 100, 1, {800}, 44);
  cfg.mu = 0.5;
  const ExperimentResult result = run_noise_study(cfg);
  const double err = result.rows.front().mean_error;
  return {err <= 0.5, fmt("mean relative error %.4g at mu=0.5, m=8n (need <= 0.5)", err)};
}

Outcome spectral_init_quality() {
  // population limit through the real code path
  const GroundTruth distinct = make_ground_truth(12, 3, {1.0, 0.5, 0.25}, 6001);
  const GroundTruth flat = make_ground_truth(20, 5, std::vector<double>(5, 0.2), 6002);
  const double d_pop_distinct =
      procrustes_align(distinct, spectral_init_from_matrix(expected_init_matrix(distinct), 3).u0)
          .distance_sq;
  const double d_pop_flat =
      procrustes_align(flat, spectral_init_from_matrix(expected_init_matrix(flat), 5).u0)
          .distance_sq;

  // benchmark-scale comparison against a norm-matched random baseline
  const std::size_t n = 20, r = 5, m = 25 * n, trials = 50;
  std::size_t wins = 0, clamps = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const Instance inst = random_instance(n, r, m, 7000 + 13 * t);
    const InitResult init = spectral_init(inst.loss.data, r);
    clamps += init.clamped ? 1 : 0;
    const double d_init = procrustes_align(inst.truth, init.u0).distance_sq;
    Rng rng(7500 + t);
    std::vector<double> d_random;
    for (int b = 0; b < 31; ++b) {
      Factor u = oracles::random_factor(n, r, rng);
      scale(u, frobenius(init.u0) / frobenius(u));
      d_random.push_back(procrustes_align(inst.truth, u).distance_sq);
    }
    if (d_init < median(d_random)) ++wins;
  }
  const bool pass = d_pop_distinct <= 1e-10 && d_pop_flat <= 1e-10 &&
                    wins >= static_cast<std::size_t>(0.9 * trials);
  return {pass, fmt("population d0 %.3g/%.3g (tol 1e-10), baseline wins %g/50 (need >= 45)",
                    d_pop_distinct, d_pop_flat, static_cast<double>(wins)) +
                    (clamps == 0 ? " | no lambda clamp activations" : " | CLAMPS SEEN")};
}

Outcome linear_convergence() {
  std::size_t successes = 0, fit_ok = 0;
  double worst_r2 = 1.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const Instance inst = random_instance(50, 1, 500, 8000 + 11 * t);
    const InitResult init = spectral_init(inst.loss.data, 1);
    DescentConfig cfg = default_descent_config(inst.loss, init);
    cfg.dist_tol = 2.5e-7;
    cfg.max_iters = 20000;
    const DescentResult run = descend(inst.loss, init.u0, cfg, &inst.truth);
    if (run.trace.points.back().dist <= 2.5e-7) {
      ++successes;
      worst_r2 = std::min(worst_r2, run.trace.fit_r2);
      if (run.trace.fit_r2 >= 0.95) ++fit_ok;
    }
  }
  const bool pass = successes >= 15 && fit_ok == successes;
  return {pass, fmt("%g/20 successful runs, worst log-d fit R^2 %.4f (need >= 0.95 on all)",
                    static_cast<double>(successes), worst_r2)};
}

Outcome complex_embedding() {
  // measurement equivalence
  Rng rng(105);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 6;
    ComplexSignal z;
    z.re.resize(n);
    z.im.resize(n);
    std::vector<double> a_re(n), a_im(n);
    for (std::size_t i = 0; i < n; ++i) {
      z.re[i] = rng.gaussian();
      z.im[i] = rng.gaussian();
      a_re[i] = rng.gaussian();
      a_im[i] = rng.gaussian();
    }
    const double want = oracles::complex_intensity(z.re, z.im, a_re, a_im);
    const std::vector<double> stacked = embed_measurement(a_re, a_im);
    Matrix vectors(2 * n, 1);
    std::copy(stacked.begin(), stacked.end(), vectors.col(0));
    const double got = measure(embed_signal(z), vectors)[0];
    worst = std::max(worst, std::fabs(got - want) / std::max(1.0, want));
  }

  // end-to-end recovery at n=32, m=16n
  const std::size_t n = 32, m = 16 * n, trials = 50;
  std::size_t ok = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng zr(9000 + t);
    ComplexSignal z;
    z.re.resize(n);
    z.im.resize(n);
    double nrm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z.re[i] = zr.gaussian();
      z.im[i] = zr.gaussian();
      nrm2 += z.re[i] * z.re[i] + z.im[i] * z.im[i];
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    for (std::size_t i = 0; i < n; ++i) {
      z.re[i] *= inv;
      z.im[i] *= inv;
    }
    const MeasurementSet data =
        measure_set(embed_signal(z), draw_complex_sensing(n, m, 9500 + t));
    DescentConfig cfg;
    cfg.max_iters = 20000;
    cfg.dist_tol = 5e-7;  // embedded d = 2 * (phase error)^2
    try {
      const ComplexRecovery rec = recover_complex(data, n, &cfg, &z);
      if (rec.phase_error <= 1e-3) ++ok;
    } catch (const DivergenceError&) {
    }
  }
  const double rate = static_cast<double>(ok) / static_cast<double>(trials);
  const bool pass = worst <= 1e-12 && rate >= 0.9;
  return {pass, fmt("identity rel err %.3g (tol 1e-12), recovery rate %.3g (need >= 0.9)",
                    worst, rate)};
}

Outcome concentration_slope() {
  const GroundTruth truth = make_ground_truth(10, 2, {0.6, 0.4}, 10001);
  const std::vector<std::size_t> m_list{1000, 10000, 100000};
  const auto rows =
      concentration_check(truth, Ensemble::standard_gaussian(10), m_list, 10002, 10, false);
  std::vector<double> log_m, log_dev;
  for (std::size_t m : m_list) {
    std::vector<double> devs;
    for (const auto& row : rows)
      if (row.m == m) devs.push_back(row.dev_init);
    log_m.push_back(std::log(static_cast<double>(m)));
    log_dev.push_back(std::log(median(devs)));
  }
  const double slope = fit_line(log_m, log_dev).slope;
  const bool pass = slope >= -0.65 && slope <= -0.35;
  return {pass, fmt("log-log slope %.4f over m in {1e3,1e4,1e5} (need -0.5 +/- 0.15)", slope)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  const std::vector<Criterion> criteria{
      {1, "gradient correctness", 10.0, gradient_correctness},
      {2, "hessian correctness", 30.0, hessian_correctness},
      {3, "expected-hessian formulas", 120.0, expected_hessian_formulas},
      {4, "bernoulli sharpness", 30.0, bernoulli_sharpness},
      {5, "gaussian constants", 30.0, gaussian_constants},
      {6, "traceless matrix sweep", 30.0, traceless_sweep},
      {7, "phase transition rank 1", 900.0, phase_transition_rank1},
      {8, "rank-5 recovery", 900.0, rank5_recovery},
      {9, "noise robustness", 600.0, noise_robustness},
      {10, "spectral init quality", 120.0, spectral_init_quality},
      {11, "linear convergence", 300.0, linear_convergence},
      {12, "complex embedding", 600.0, complex_embedding},
      {13, "concentration slope", 300.0, concentration_slope},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = outcome.pass && in_budget;
    if (!pass) ++failures;
    std::printf("[%2d] %s  %-26s (%.1fs%s)  %s\n", c.id, pass ? "PASS" : "FAIL", c.name, secs,
                in_budget ? "" : " OVER BUDGET", outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("acceptance: all criteria pass\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  }
  return failures;
}
