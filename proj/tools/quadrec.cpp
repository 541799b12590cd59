// quadrec command line: recover a factor from measurement CSV, run the
// benchmark experiments, run the verification suite, or sketch a vector
// stream. Exit codes: 0 ok, 1 config error, 2 property failure, 3 numerical
// failure.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "quadrec/analysis.hpp"
#include "quadrec/bench.hpp"
#include "quadrec/kernels.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/objective.hpp"
#include "quadrec/phase.hpp"
#include "quadrec/recover.hpp"

namespace {

using namespace quadrec;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitProperty = 2;
constexpr int kExitNumerical = 3;

void print_properties(const ExperimentResult& result) {
  for (const PropertyResult& p : result.properties) {
    std::printf("%-34s %s  measured=%.6g threshold=%.6g  %s\n", p.name.c_str(),
                p.pass ? "PASS" : "FAIL", p.measured, p.threshold, p.note.c_str());
  }
}

int cmd_recover(const std::string& input, std::size_t rank, const std::string& out_path,
                double gamma, std::size_t max_iters, const std::string& trace_path) {
  const MeasurementSet data = load_measurements_csv(input);
  const QuadraticLoss loss = make_loss(data, rank);
  const InitResult init = spectral_init(loss.data, rank);

  DescentConfig cfg;
  cfg.gamma = gamma > 0.0 ? gamma : default_step_size(init, loss.n);
  cfg.max_iters = max_iters;
  const DescentResult run = descend(loss, init.u0, cfg);

  save_matrix(run.u, out_path);
  if (!trace_path.empty()) save_trace_csv(run.trace, trace_path);
  const TracePoint& last = run.trace.points.back();
  std::printf("recovered %zux%zu factor in %zu iterations (f=%.6g, |grad|=%.6g) -> %s\n",
              loss.n, rank, last.iter, last.f, last.grad_norm, out_path.c_str());
  return kExitOk;
}

int cmd_sketch(const std::string& stream_path, std::size_t sensors, std::size_t rank,
               const std::string& out_path, std::uint64_t seed, double gamma,
               std::size_t max_iters) {
  std::vector<std::vector<double>> xs;
  std::size_t n = 0;
  {
    std::istream* in = &std::cin;
    std::ifstream file;
    if (stream_path != "-") {
      file.open(stream_path);
      if (!file) throw ConfigError("cannot open stream file: " + stream_path);
      in = &file;
    }
    std::string first_line;
    while (std::getline(*in, first_line)) {
      std::istringstream ls(first_line);
      std::vector<double> x;
      double v;
      while (ls >> v) x.push_back(v);
      if (x.empty()) continue;
      n = x.size();
      xs.push_back(std::move(x));
      break;
    }
    if (n == 0) throw ConfigError("stream contains no vectors");
    auto rest = load_vector_stream(*in, n);
    xs.insert(xs.end(), rest.begin(), rest.end());
  }
  if (rank + 1 > n) throw ConfigError("sketch: need rank + 1 <= n");
  if (sensors < rank + 1) throw ConfigError("sketch: need sensors >= rank + 1");

  SketchAccumulator acc =
      make_sketch_accumulator(draw(Ensemble::standard_gaussian(n), sensors, seed));
  for (const auto& x : xs) sketch_ingest(acc, x);
  const MeasurementSet data = sketch_finalize(acc);

  const QuadraticLoss loss = make_loss(data, rank);
  const InitResult init = spectral_init(data, rank);
  DescentConfig cfg;
  cfg.gamma = gamma > 0.0 ? gamma : default_step_size(init, n);
  cfg.max_iters = max_iters;
  const DescentResult run = descend(loss, init.u0, cfg);

  save_matrix(run.u, out_path);
  std::printf("sketched %zu vectors (dim %zu) through %zu sensors; rank-%zu factor -> %s\n",
              xs.size(), n, sensors, rank, out_path.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadrec: low-rank matrix recovery from quadratic measurements"};
  app.require_subcommand(1);

  std::string kernel_isa;
  app.add_option("--kernel", kernel_isa, "force kernel ISA (scalar|avx2)")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  // recover
  auto* recover_cmd = app.add_subcommand("recover", "recover a factor from measurement CSV");
  std::string rec_input, rec_out = "xhat.txt", rec_trace;
  std::size_t rec_rank = 1, rec_iters = 100000;
  double rec_gamma = 0.0;
  recover_cmd->add_option("--input", rec_input, "measurement CSV (i,y,a_1..a_n)")->required();
  recover_cmd->add_option("--rank", rec_rank, "factor rank r")->required();
  recover_cmd->add_option("--out", rec_out, "output factor path");
  recover_cmd->add_option("--gamma", rec_gamma, "step size (default: 0.1/(n*lambda1))");
  recover_cmd->add_option("--max-iters", rec_iters, "iteration cap");
  recover_cmd->add_option("--trace", rec_trace, "write iteration trace CSV here");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run an experiment from a config file");
  std::string bench_experiment, bench_config, bench_out = "results.csv";
  bench_cmd->add_option("experiment", bench_experiment,
                        "phase-transition-r1|noise|phase-transition-r5|verify|sketch-demo|recover")
      ->required();
  bench_cmd->add_option("--config", bench_config, "flat key = value config file")->required();
  bench_cmd->add_option("--out", bench_out, "results CSV path");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the property verification suite");
  std::string verify_config, verify_out;
  bool inject_bug = false;
  double verify_scale = 1.0;
  verify_cmd->add_option("--config", verify_config, "optional config with thresholds");
  verify_cmd->add_option("--out", verify_out, "write property CSV here");
  verify_cmd->add_option("--scale", verify_scale, "Monte Carlo size multiplier");
  verify_cmd->add_flag("--inject-bug", inject_bug, "negative-control self test (flips gradient)");

  // sketch
  auto* sketch_cmd = app.add_subcommand("sketch", "sketch a vector stream and recover");
  std::string sketch_stream, sketch_out = "xhat.txt";
  std::size_t sketch_sensors = 0, sketch_rank = 1, sketch_iters = 100000;
  std::uint64_t sketch_seed = 0;
  double sketch_gamma = 0.0;
  sketch_cmd->add_option("--stream", sketch_stream, "vector stream file ('-' for stdin)")->required();
  sketch_cmd->add_option("--sensors", sketch_sensors, "number of sensing vectors K")->required();
  sketch_cmd->add_option("--rank", sketch_rank, "target rank r")->required();
  sketch_cmd->add_option("--out", sketch_out, "output factor path");
  sketch_cmd->add_option("--seed", sketch_seed, "sensing-vector seed");
  sketch_cmd->add_option("--gamma", sketch_gamma, "step size override");
  sketch_cmd->add_option("--max-iters", sketch_iters, "iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!kernel_isa.empty())
      kernels::force_isa(kernel_isa == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar);

    if (*recover_cmd) return cmd_recover(rec_input, rec_rank, rec_out, rec_gamma, rec_iters, rec_trace);

    if (*bench_cmd) {
      ExperimentConfig cfg = parse_config_file(bench_config, bench_experiment);
      cfg.validate();
      const ExperimentResult result = run_experiment(cfg);
      const std::string out_path = !cfg.output.empty() ? cfg.output : bench_out;
      write_result_csv(result, out_path);
      if (!result.properties.empty()) print_properties(result);
      std::printf("wrote %s\n", out_path.c_str());
      return result.all_pass ? kExitOk : kExitProperty;
    }

    if (*verify_cmd) {
      ExperimentConfig cfg;
      cfg.experiment = ExperimentKind::verify;
      if (!verify_config.empty()) cfg = parse_config_file(verify_config, "verify");
      VerifyOptions opts;
      opts.inject_gradient_bug = inject_bug;
      opts.scale = verify_scale;
      const ExperimentResult result = run_verify(cfg, opts);
      print_properties(result);
      if (!verify_out.empty()) write_result_csv(result, verify_out);
      if (!result.all_pass) {
        std::printf("verify: FAILURES detected\n");
        return kExitProperty;
      }
      std::printf("verify: all properties pass\n");
      return kExitOk;
    }

    if (*sketch_cmd)
      return cmd_sketch(sketch_stream, sketch_sensors, sketch_rank, sketch_out, sketch_seed,
                        sketch_gamma, sketch_iters);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
