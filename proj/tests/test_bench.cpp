#include <doctest.h>

#include <regex>
#include <sstream>

#include "quadrec/bench.hpp"
#include "quadrec/linalg.hpp"

using namespace quadrec;

namespace {

ExperimentConfig config_from(const std::string& text, const std::string& expected = "") {
  std::stringstream in(text);
  return parse_config(in, expected);
}

// Results CSV with the wall_s field blanked out, for byte-determinism checks.
std::string strip_wall(const ExperimentResult& result) {
  std::stringstream buf;
  write_result_csv(result, buf);
  return std::regex_replace(buf.str(), std::regex(",[0-9.]+\n"), ",WALL\n");
}

}  // namespace

TEST_CASE("config parsing: happy path") {
  const ExperimentConfig cfg = config_from(
      "experiment = phase-transition-r1\n"
      "n = 40\n"
      "r = 1\n"
      "m_grid = 80,160,320\n"
      "trials = 4\n"
      "seed = 9\n"
      "# comment line\n"
      "ensemble = bernoulli\n");
  CHECK(cfg.experiment == ExperimentKind::phase_transition_r1);
  CHECK(cfg.n == 40);
  CHECK(cfg.m_grid == std::vector<std::size_t>{80, 160, 320});
  CHECK(cfg.ensemble == Ensemble::Kind::bernoulli);
  cfg.validate();
}

TEST_CASE("config parsing: errors") {
  CHECK_THROWS_AS(config_from("bogus = 1\n", "recover"), ConfigError);
  CHECK_THROWS_AS(config_from("n =\n", "recover"), ConfigError);
  CHECK_THROWS_AS(config_from("n = abc\n", "recover"), ConfigError);
  CHECK_THROWS_AS(config_from("experiment = noise\n", "recover"), ConfigError);
  CHECK_THROWS_AS(config_from("n = 10\n"), ConfigError);  // no experiment anywhere
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = config_from("experiment = recover\nn = 10\nr = 2\nm_grid = 40,80\n");
  cfg.validate();

  ExperimentConfig bad = cfg;
  bad.m_grid = {80, 40};
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.m_grid.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.experiment = ExperimentKind::phase_transition_r1;
  bad.r = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.experiment = ExperimentKind::sketch_demo;
  bad.r = bad.n;  // degenerate full-rank request
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("quarter-decay covariance is SPD with the right entries") {
  const Matrix sigma = quarter_decay_covariance(50);
  CHECK(sigma(0, 0) == 1.0);
  CHECK(sigma(0, 1) == 0.25);
  CHECK(sigma(0, 2) == 0.125);
  CHECK_NOTHROW(cholesky(sigma));
}

TEST_CASE("experiments are deterministic modulo the timing column") {
  const ExperimentConfig cfg = config_from(
      "experiment = recover\nn = 12\nr = 1\nm_grid = 48,96\ntrials = 3\nseed = 5\n"
      "max_iters = 3000\n");
  const std::string a = strip_wall(run_recover_experiment(cfg));
  const std::string b = strip_wall(run_recover_experiment(cfg));
  CHECK(a == b);
  CHECK(a.find("m,success_rate,mean_error,mean_iters,wall_s") != std::string::npos);
  CHECK(a.find("# quadrec results v1") != std::string::npos);
}

TEST_CASE("mu = 0 noise study reduces to the noiseless experiment") {
  const std::string base =
      "n = 12\nr = 1\nm_grid = 96\ntrials = 3\nseed = 6\nmax_iters = 3000\n";
  const ExperimentConfig noiseless = config_from("experiment = recover\n" + base);
  ExperimentConfig zero_noise = config_from("experiment = noise\nmu = 0\n" + base);
  const ExperimentResult a = run_recover_experiment(noiseless);
  const ExperimentResult b = run_noise_study(zero_noise);
  REQUIRE(a.rows.size() == b.rows.size());
  CHECK(a.rows[0].success_rate == b.rows[0].success_rate);
  CHECK(a.rows[0].mean_error == b.rows[0].mean_error);
  CHECK(a.rows[0].mean_iters == b.rows[0].mean_iters);
}

TEST_CASE("noise study error grows with mu in the median") {
  std::vector<double> errs;
  for (double mu : {0.1, 0.7, 2.5}) {
    std::stringstream in("experiment = noise\nn = 12\nr = 1\nm_grid = 96\ntrials = 5\nseed = 11\n"
                         "max_iters = 4000\nmu = " + std::to_string(mu) + "\n");
    const ExperimentConfig cfg = parse_config(in);
    errs.push_back(run_noise_study(cfg).rows[0].mean_error);
  }
  CHECK(errs[0] < errs[1]);
  CHECK(errs[1] < errs[2]);
}

TEST_CASE("sketch demo recovers near the sampling floor") {
  const ExperimentConfig cfg = config_from(
      "experiment = sketch-demo\nn = 20\nr = 2\nseed = 3\nstream_len = 100000\n"
      "max_iters = 20000\n");
  const ExperimentResult result = run_sketch_demo(cfg);
  REQUIRE(result.rows.size() == 1);
  REQUIRE(result.properties.size() == 3);
  const double err_rec = result.properties[0].measured;
  const double err_floor = result.properties[1].measured;
  CHECK(err_rec <= 2.0 * err_floor);
  CHECK(result.all_pass);
}

TEST_CASE("verify negative control trips the gradient check only") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::verify;
  VerifyOptions opts;
  opts.scale = 0.1;
  opts.inject_gradient_bug = true;
  const ExperimentResult result = run_verify(cfg, opts);
  CHECK_FALSE(result.all_pass);
  REQUIRE_FALSE(result.properties.empty());
  CHECK(result.properties[0].name == "gradient-finite-difference");
  CHECK_FALSE(result.properties[0].pass);
  // everything downstream of the gradient is untouched by the injected bug
  for (std::size_t i = 1; i < result.properties.size(); ++i) CHECK(result.properties[i].pass);
}

TEST_CASE("verify csv emits property rows") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::verify;
  VerifyOptions opts;
  opts.scale = 0.1;
  const ExperimentResult result = run_verify(cfg, opts);
  CHECK(result.all_pass);
  std::stringstream buf;
  write_result_csv(result, buf);
  CHECK(buf.str().find("property,pass,measured,threshold") != std::string::npos);
  CHECK(buf.str().find("bernoulli-zero-eigenvalue") != std::string::npos);
}

TEST_CASE("success rate rises with m on a tiny transition") {
  const ExperimentConfig cfg = config_from(
      "experiment = recover\nn = 16\nr = 1\nm_grid = 32,64,160\ntrials = 6\nseed = 21\n"
      "max_iters = 5000\n");
  const ExperimentResult result = run_recover_experiment(cfg);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows.front().success_rate <= result.rows.back().success_rate);
  CHECK(result.rows.back().success_rate >= 0.8);
}
