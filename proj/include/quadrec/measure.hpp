// Sensing ensembles, quadratic measurements y_i = ||a_i^T X||^2, additive
// noise, and the streaming covariance-sketch accumulator.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quadrec/matrix.hpp"

namespace quadrec {

struct Ensemble {
  enum class Kind { standard_gaussian, gaussian_cov, bernoulli, sparse_gaussian };

  Kind kind = Kind::standard_gaussian;
  std::size_t n = 0;
  Matrix sigma;          // gaussian_cov only: SPD covariance
  double sparse_p = 1.0; // sparse_gaussian only: keep probability in (0,1]

  static Ensemble standard_gaussian(std::size_t n);
  static Ensemble gaussian_cov(Matrix sigma);
  static Ensemble bernoulli(std::size_t n);
  static Ensemble sparse_gaussian(std::size_t n, double p);

  // E[a a^T] for this ensemble.
  Matrix covariance() const;
  std::string name() const;
};

struct MeasurementSet {
  Matrix vectors;              // n-by-m, column i holds a_i
  std::vector<double> values;  // y_i
  std::optional<std::vector<double>> clean_values;  // pre-noise copy when noisy

  std::size_t m() const { return vectors.cols; }
  std::size_t n() const { return vectors.rows; }
};

// m i.i.d. draws from the ensemble, deterministic given the seed.
// Result is n-by-m with one sensing vector per column.
Matrix draw(const Ensemble& ensemble, std::size_t m, std::uint64_t seed);

// y_i = ||a_i^T X||^2 = a_i^T XX^T a_i, always nonnegative.
std::vector<double> measure(const Factor& x, const Matrix& vectors);
MeasurementSet measure_set(const Factor& x, const Matrix& vectors);

enum class NoiseNorm { vector, scalar };

struct NoiseSpec {
  double mu = 0.0;                       // relative noise level, >= 0
  NoiseNorm norm = NoiseNorm::vector;    // what ||eta|| is normalized against
};

// Adds i.i.d. mean-zero uniform noise rescaled so that ||eta||_2 equals
// mu * ||y_clean||_2 (vector norm, default) or mu * |sum_i y_i| (scalar).
std::vector<double> add_noise(const std::vector<double>& clean, const NoiseSpec& spec,
                              std::uint64_t seed);
MeasurementSet add_noise(const MeasurementSet& clean, const NoiseSpec& spec, std::uint64_t seed);

// Streaming second-moment sketch: K fixed sensing vectors, running sums of
// (a_k^T x_j)^2 over the stream. finalize() yields y_k = a_k^T Sigma_hat a_k
// for the sample covariance Sigma_hat of the ingested vectors.
struct SketchAccumulator {
  Matrix sensing;            // n-by-K
  std::vector<double> sums;  // K running sums
  std::size_t count = 0;
};

SketchAccumulator make_sketch_accumulator(Matrix sensing);
void sketch_ingest(SketchAccumulator& acc, const std::vector<double>& x);
MeasurementSet sketch_finalize(const SketchAccumulator& acc);

// Monte Carlo estimate of the coordinatewise fourth moment of the whitened
// draw b = Sigma^{-1/2} a (3 for Gaussian, 1 for Bernoulli, 3/p sparse).
double estimate_mu4(const Ensemble& ensemble, std::size_t samples, std::uint64_t seed);

// CSV with header "i,y,a_1,...,a_n"; one row per measurement, 17 significant
// digits. The loader validates the column count.
void save_measurements_csv(const MeasurementSet& data, std::ostream& out);
void save_measurements_csv(const MeasurementSet& data, const std::string& path);
MeasurementSet load_measurements_csv(std::istream& in);
MeasurementSet load_measurements_csv(const std::string& path);

// Newline-delimited stream of n-vectors (whitespace-separated entries).
std::vector<std::vector<double>> load_vector_stream(std::istream& in, std::size_t n);

}  // namespace quadrec
