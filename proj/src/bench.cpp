#include "quadrec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "quadrec/analysis.hpp"
#include "quadrec/kernels.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/objective.hpp"
#include "quadrec/recover.hpp"
#include "quadrec/rng.hpp"
#include "quadrec/stats.hpp"

namespace quadrec {

namespace {

double wall_seconds(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::phase_transition_r1: return "phase-transition-r1";
    case ExperimentKind::noise: return "noise";
    case ExperimentKind::phase_transition_r5: return "phase-transition-r5";
    case ExperimentKind::verify: return "verify";
    case ExperimentKind::sketch_demo: return "sketch-demo";
    case ExperimentKind::recover: return "recover";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (ExperimentKind kind :
       {ExperimentKind::phase_transition_r1, ExperimentKind::noise,
        ExperimentKind::phase_transition_r5, ExperimentKind::verify, ExperimentKind::sketch_demo,
        ExperimentKind::recover}) {
    if (name == experiment_name(kind)) return kind;
  }
  throw ConfigError("unknown experiment: " + name);
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(success_tol > 0.0)) throw ConfigError("success_tol must be > 0");
  if (mu < 0.0) throw ConfigError("mu must be >= 0");
  if (!(sparse_p > 0.0 && sparse_p <= 1.0)) throw ConfigError("sparse_p must be in (0,1]");
  if (r < 1 || n < r) throw ConfigError("need n >= r >= 1");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");

  const bool recovery_grid = experiment == ExperimentKind::phase_transition_r1 ||
                             experiment == ExperimentKind::phase_transition_r5 ||
                             experiment == ExperimentKind::noise ||
                             experiment == ExperimentKind::recover;
  if (recovery_grid) {
    if (m_grid.empty()) throw ConfigError("m_grid must be nonempty");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
      if (m_grid[i] < r + 1) throw ConfigError("every m must be >= r + 1");
      if (i > 0 && m_grid[i] <= m_grid[i - 1]) throw ConfigError("m_grid must be ascending");
    }
    if (r + 1 > n) throw ConfigError("spectral init needs r + 1 <= n");
  }
  if (experiment == ExperimentKind::phase_transition_r1 && r != 1)
    throw ConfigError("phase-transition-r1 requires r = 1");
  if (experiment == ExperimentKind::phase_transition_r5 && r != 5)
    throw ConfigError("phase-transition-r5 requires r = 5");
  if (experiment == ExperimentKind::sketch_demo) {
    if (r + 1 > n) throw ConfigError("sketch-demo requires r + 1 <= n");
    if (stream_len < 1) throw ConfigError("stream_len must be >= 1");
    if (sensors != 0 && sensors < r + 1) throw ConfigError("sensors must be >= r + 1");
  }
  if (ensemble == Ensemble::Kind::gaussian_cov && cov.empty())
    throw ConfigError("gaussian-cov ensemble requires a cov entry");
}

namespace {

std::vector<std::size_t> parse_m_grid(const std::string& value) {
  std::vector<std::size_t> grid;
  std::string token;
  std::istringstream in(value);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    grid.push_back(std::stoull(token));
  }
  return grid;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& expected) {
  ExperimentConfig cfg;
  bool have_experiment = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("config key '" + key + "' has no value");

    try {
      if (key == "experiment") {
        cfg.experiment = parse_experiment(value);
        have_experiment = true;
      } else if (key == "n") {
        cfg.n = std::stoull(value);
      } else if (key == "r" || key == "rank") {
        cfg.r = std::stoull(value);
      } else if (key == "m_grid") {
        cfg.m_grid = parse_m_grid(value);
      } else if (key == "trials") {
        cfg.trials = std::stoull(value);
      } else if (key == "ensemble") {
        if (value == "standard-gaussian") cfg.ensemble = Ensemble::Kind::standard_gaussian;
        else if (value == "bernoulli") cfg.ensemble = Ensemble::Kind::bernoulli;
        else if (value == "sparse-gaussian") cfg.ensemble = Ensemble::Kind::sparse_gaussian;
        else if (value == "gaussian-cov") cfg.ensemble = Ensemble::Kind::gaussian_cov;
        else throw ConfigError("unknown ensemble: " + value);
      } else if (key == "sparse_p") {
        cfg.sparse_p = std::stod(value);
      } else if (key == "cov") {
        cfg.cov = value;
      } else if (key == "mu") {
        cfg.mu = std::stod(value);
      } else if (key == "noise_norm") {
        if (value == "vector") cfg.noise_norm = NoiseNorm::vector;
        else if (value == "scalar") cfg.noise_norm = NoiseNorm::scalar;
        else throw ConfigError("noise_norm must be vector or scalar");
      } else if (key == "success_tol") {
        cfg.success_tol = std::stod(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else if (key == "gamma") {
        cfg.gamma = std::stod(value);
      } else if (key == "max_iters") {
        cfg.max_iters = std::stoull(value);
      } else if (key == "curvature_fraction") {
        cfg.curvature_fraction = std::stod(value);
      } else if (key == "region_fraction") {
        cfg.region_fraction = std::stod(value);
      } else if (key == "stream_len") {
        cfg.stream_len = std::stoull(value);
      } else if (key == "sensors") {
        cfg.sensors = std::stoull(value);
      } else if (key == "output") {
        cfg.output = value;
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("config key '" + key + "': bad value '" + value + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError("config key '" + key + "': value out of range");
    }
  }

  if (!expected.empty()) {
    const ExperimentKind want = parse_experiment(expected);
    if (have_experiment && cfg.experiment != want)
      throw ConfigError(std::string("config experiment '") + experiment_name(cfg.experiment) +
                        "' does not match requested '" + expected + "'");
    cfg.experiment = want;
  } else if (!have_experiment) {
    throw ConfigError("config is missing the experiment key");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path, const std::string& expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in, expected);
}

Matrix quarter_decay_covariance(std::size_t n) {
  Matrix sigma(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      sigma(i, j) = i == j ? 1.0 : 0.25 / static_cast<double>(i > j ? i - j : j - i);
    }
  }
  return sigma;
}

Ensemble make_ensemble(const ExperimentConfig& cfg) {
  switch (cfg.ensemble) {
    case Ensemble::Kind::standard_gaussian: return Ensemble::standard_gaussian(cfg.n);
    case Ensemble::Kind::bernoulli: return Ensemble::bernoulli(cfg.n);
    case Ensemble::Kind::sparse_gaussian: return Ensemble::sparse_gaussian(cfg.n, cfg.sparse_p);
    case Ensemble::Kind::gaussian_cov: {
      Matrix sigma = cfg.cov == "quarter-decay" ? quarter_decay_covariance(cfg.n)
                                                : load_matrix(cfg.cov);
      if (sigma.rows != cfg.n)
        throw ConfigError("covariance dimension does not match n");
      return Ensemble::gaussian_cov(std::move(sigma));
    }
  }
  throw ConfigError("bad ensemble");
}

void parallel_trials(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  std::size_t workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min(workers, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct TrialOutcome {
  double error = 0.0;  // sqrt(d(U_final)) / ||X||_F
  double iters = 0.0;
  bool success = false;
  bool clamped = false;
  bool diverged = false;
};

TrialOutcome run_recovery_trial(const ExperimentConfig& cfg, const Ensemble& ens, std::size_t m,
                                std::uint64_t stream, bool noisy) {
  const std::uint64_t s = mix_seed(cfg.seed, stream);
  const std::vector<double> eigs(cfg.r, 1.0 / static_cast<double>(cfg.r));
  const GroundTruth truth = make_ground_truth(cfg.n, cfg.r, eigs, mix_seed(s, 1));

  MeasurementSet data = measure_set(truth.x, draw(ens, m, mix_seed(s, 2)));
  if (noisy) data = add_noise(data, NoiseSpec{cfg.mu, cfg.noise_norm}, mix_seed(s, 3));

  const QuadraticLoss loss = make_loss(std::move(data), cfg.r);
  const InitResult init = spectral_init(loss.data, cfg.r);

  DescentConfig dcfg;
  dcfg.gamma = cfg.gamma > 0.0 ? cfg.gamma : default_step_size(init, cfg.n);
  dcfg.max_iters = cfg.max_iters;
  dcfg.dist_tol = 0.25 * cfg.success_tol * cfg.success_tol;

  TrialOutcome out;
  out.clamped = init.clamped;
  double final_d;
  try {
    const DescentResult run = descend(loss, init.u0, dcfg, &truth);
    final_d = run.trace.points.back().dist;
    out.iters = static_cast<double>(run.trace.points.back().iter);
  } catch (const DivergenceError&) {
    out.diverged = true;
    final_d = procrustes_align(truth, init.u0).distance_sq;
    out.iters = static_cast<double>(cfg.max_iters);
  }
  out.error = std::sqrt(std::max(0.0, final_d));  // ||X||_F = 1 by construction
  out.success = out.error <= cfg.success_tol;
  return out;
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream meta;
  meta << "experiment=" << experiment_name(cfg.experiment) << " n=" << cfg.n << " r=" << cfg.r
       << " trials=" << cfg.trials << " seed=" << cfg.seed;
  meta << " ensemble=";
  switch (cfg.ensemble) {
    case Ensemble::Kind::standard_gaussian: meta << "standard-gaussian"; break;
    case Ensemble::Kind::bernoulli: meta << "bernoulli"; break;
    case Ensemble::Kind::sparse_gaussian: meta << "sparse-gaussian(p=" << cfg.sparse_p << ")"; break;
    case Ensemble::Kind::gaussian_cov: meta << "gaussian-cov(" << cfg.cov << ")"; break;
  }
  meta << " mu=" << cfg.mu << " noise_norm="
       << (cfg.noise_norm == NoiseNorm::vector ? "vector" : "scalar")
       << " success_tol=" << cfg.success_tol << " gamma=" << cfg.gamma
       << " max_iters=" << cfg.max_iters;
  return meta.str();
}

ExperimentResult run_recovery_grid(const ExperimentConfig& cfg, bool noisy) {
  cfg.validate();
  const Ensemble ens = make_ensemble(cfg);

  ExperimentResult result;
  result.metadata = config_echo(cfg);
  std::size_t clamp_count = 0;

  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const std::size_t m = cfg.m_grid[mi];
    const auto start = std::chrono::steady_clock::now();
    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_trials(cfg.trials, [&](std::size_t t) {
      const std::uint64_t stream = (static_cast<std::uint64_t>(mi) << 32) | t;
      outcomes[t] = run_recovery_trial(cfg, ens, m, stream, noisy);
    });

    ResultRow row;
    row.m = m;
    for (const TrialOutcome& o : outcomes) {
      row.success_rate += o.success ? 1.0 : 0.0;
      row.mean_error += o.error;
      row.mean_iters += o.iters;
      clamp_count += o.clamped ? 1 : 0;
    }
    const double inv = 1.0 / static_cast<double>(cfg.trials);
    row.success_rate *= inv;
    row.mean_error *= inv;
    row.mean_iters *= inv;
    row.wall_s = wall_seconds(start);
    result.rows.push_back(row);
  }

  if (clamp_count > 0) {
    result.metadata += " clamp_activations=" + std::to_string(clamp_count);
  }
  return result;
}

}  // namespace

ExperimentResult run_phase_transition(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::phase_transition_r1 &&
      cfg.experiment != ExperimentKind::phase_transition_r5)
    throw ConfigError("run_phase_transition: wrong experiment kind");
  return run_recovery_grid(cfg, false);
}

ExperimentResult run_noise_study(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::noise) throw ConfigError("run_noise_study: wrong experiment kind");
  return run_recovery_grid(cfg, true);
}

ExperimentResult run_recover_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::recover) throw ConfigError("run_recover_experiment: wrong experiment kind");
  return run_recovery_grid(cfg, cfg.mu > 0.0);
}

ExperimentResult run_sketch_demo(const ExperimentConfig& cfg) {
  if (cfg.experiment != ExperimentKind::sketch_demo) throw ConfigError("run_sketch_demo: wrong experiment kind");
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n = cfg.n, r = cfg.r;
  const std::size_t sensors = cfg.sensors == 0 ? 25 * n * r : cfg.sensors;
  const std::uint64_t s = mix_seed(cfg.seed, 0x53e7c4ULL);

  const std::vector<double> eigs(r, 1.0 / static_cast<double>(r));
  const GroundTruth planted = make_ground_truth(n, r, eigs, mix_seed(s, 1));
  Matrix sigma_planted(n, n);
  for (std::size_t k = 0; k < r; ++k) kernels::syr(1.0, planted.x.col(k), n, sigma_planted.data.data());
  const double sigma_norm = frobenius(sigma_planted);

  SketchAccumulator acc = make_sketch_accumulator(draw(Ensemble::standard_gaussian(n), sensors, mix_seed(s, 2)));
  Matrix sample_cov(n, n);
  Rng stream_rng(mix_seed(s, 3));
  std::vector<double> x(n), g(r);
  for (std::size_t j = 0; j < cfg.stream_len; ++j) {
    for (std::size_t k = 0; k < r; ++k) g[k] = stream_rng.gaussian();
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t k = 0; k < r; ++k) kernels::axpy(g[k], planted.x.col(k), x.data(), n);
    sketch_ingest(acc, x);
    kernels::syr(1.0, x.data(), n, sample_cov.data.data());
  }
  scale(sample_cov, 1.0 / static_cast<double>(cfg.stream_len));

  const MeasurementSet sketched = sketch_finalize(acc);
  const QuadraticLoss loss = make_loss(sketched, r);
  const InitResult init = spectral_init(loss.data, r);
  DescentConfig dcfg;
  dcfg.gamma = cfg.gamma > 0.0 ? cfg.gamma : default_step_size(init, n);
  dcfg.max_iters = cfg.max_iters;
  const DescentResult run = descend(loss, init.u0, dcfg);

  Matrix recovered_gram(n, n);
  for (std::size_t k = 0; k < r; ++k) kernels::syr(1.0, run.u.col(k), n, recovered_gram.data.data());
  const double err_rec = frobenius(sub(recovered_gram, sigma_planted)) / sigma_norm;
  const double err_sampling = frobenius(sub(sample_cov, sigma_planted)) / sigma_norm;

  // Oracle route: best rank-r approximation of the exact sample covariance.
  const SymEig cov_eig = sym_eig(sample_cov);
  Matrix best_rank_r(n, n);
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<double> v(cov_eig.vectors.col(k), cov_eig.vectors.col(k) + n);
    kernels::syr(std::max(0.0, cov_eig.values[k]), v.data(), n, best_rank_r.data.data());
  }
  const double err_best = frobenius(sub(best_rank_r, sigma_planted)) / sigma_norm;

  ExperimentResult result;
  result.metadata = config_echo(cfg) + " stream_len=" + std::to_string(cfg.stream_len) +
                    " sensors=" + std::to_string(sensors);
  const bool pass = err_rec <= 2.0 * err_sampling;
  ResultRow row;
  row.m = cfg.stream_len;
  row.success_rate = pass ? 1.0 : 0.0;
  row.mean_error = err_rec;
  row.mean_iters = static_cast<double>(run.trace.points.back().iter);
  row.wall_s = wall_seconds(start);
  result.rows.push_back(row);
  result.properties.push_back({"sketch-recovery-error", pass, err_rec, 2.0 * err_sampling, ""});
  result.properties.push_back({"covariance-sampling-floor", true, err_sampling, 0.0, ""});
  result.properties.push_back({"best-rank-r-floor", true, err_best, 0.0, ""});
  result.all_pass = pass;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::phase_transition_r1:
    case ExperimentKind::phase_transition_r5:
      return run_phase_transition(cfg);
    case ExperimentKind::noise:
      return run_noise_study(cfg);
    case ExperimentKind::recover:
      return run_recover_experiment(cfg);
    case ExperimentKind::sketch_demo:
      return run_sketch_demo(cfg);
    case ExperimentKind::verify:
      return run_verify(cfg);
  }
  throw ConfigError("bad experiment kind");
}

void write_result_csv(const ExperimentResult& result, std::ostream& out) {
  out << "# quadrec results v1 | " << result.metadata << " | build=gcc-" << __VERSION__ << "\n";
  if (!result.rows.empty() || result.properties.empty()) {
    out << "m,success_rate,mean_error,mean_iters,wall_s\n";
    char buf[64];
    for (const ResultRow& row : result.rows) {
      std::snprintf(buf, sizeof buf, "%zu,%.6g,%.10g,%.6g,%.3f", row.m, row.success_rate,
                    row.mean_error, row.mean_iters, row.wall_s);
      out << buf << "\n";
    }
  } else {
    out << "property,pass,measured,threshold\n";
    char buf[64];
    for (const PropertyResult& p : result.properties) {
      std::snprintf(buf, sizeof buf, ",%d,%.10g,%.10g", p.pass ? 1 : 0, p.measured, p.threshold);
      out << p.name << buf << "\n";
    }
  }
}

void write_result_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_result_csv(result, out);
}

}  // namespace quadrec
