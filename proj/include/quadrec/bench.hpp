// Experiment configs, the study runners behind the CLI (phase transitions,
// noise robustness, sketch demo, property verification), and their CSV
// output. Every experiment is a deterministic function of (config, seed)
// modulo the wall-clock column.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadrec/measure.hpp"

namespace quadrec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  phase_transition_r1,
  noise,
  phase_transition_r5,
  verify,
  sketch_demo,
  recover,
};

const char* experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::recover;
  std::size_t n = 100;
  std::size_t r = 1;
  std::vector<std::size_t> m_grid;
  std::size_t trials = 100;
  Ensemble::Kind ensemble = Ensemble::Kind::standard_gaussian;
  double sparse_p = 0.5;
  std::string cov;  // "quarter-decay" or a matrix file path (gaussian-cov)
  double mu = 0.0;
  NoiseNorm noise_norm = NoiseNorm::vector;
  double success_tol = 1e-3;
  std::uint64_t seed = 0;
  double gamma = 0.0;       // 0: auto step size
  std::size_t max_iters = 20000;
  // verify thresholds (empirical-frequency acceptance levels)
  double curvature_fraction = 0.95;
  double region_fraction = 0.8;
  // sketch-demo stream length J and sensing count K (0: 25*n*r)
  std::size_t stream_len = 100000;
  std::size_t sensors = 0;
  std::string output;

  void validate() const;  // throws ConfigError
};

// Flat "key = value" text; '#' starts a comment; unknown keys are errors.
// When `expected` is non-empty it must match the config's experiment.
ExperimentConfig parse_config(std::istream& in, const std::string& expected = "");
ExperimentConfig parse_config_file(const std::string& path, const std::string& expected = "");

Ensemble make_ensemble(const ExperimentConfig& cfg);

// Banded benchmark covariance: 1 on the diagonal, 1/(4|i-j|) off it.
Matrix quarter_decay_covariance(std::size_t n);

struct ResultRow {
  std::size_t m = 0;
  double success_rate = 0.0;
  double mean_error = 0.0;
  double mean_iters = 0.0;
  double wall_s = 0.0;
};

struct PropertyResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<PropertyResult> properties;  // verify / sketch detail
  std::string metadata;                    // config echo for the CSV header
  bool all_pass = true;
};

ExperimentResult run_phase_transition(const ExperimentConfig& cfg);
ExperimentResult run_noise_study(const ExperimentConfig& cfg);
ExperimentResult run_recover_experiment(const ExperimentConfig& cfg);
ExperimentResult run_sketch_demo(const ExperimentConfig& cfg);

struct VerifyOptions {
  bool inject_gradient_bug = false;  // negative control: flips the gradient sign
  double scale = 1.0;                // shrinks Monte Carlo sizes for quick runs
};

ExperimentResult run_verify(const ExperimentConfig& cfg, const VerifyOptions& opts = {});

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Header comment line + "m,success_rate,mean_error,mean_iters,wall_s" rows;
// verify results emit "property,pass,measured,threshold" rows instead.
void write_result_csv(const ExperimentResult& result, std::ostream& out);
void write_result_csv(const ExperimentResult& result, const std::string& path);

// Deterministic static-partition parallel loop; fn(i) for i in [0, count).
void parallel_trials(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace quadrec
