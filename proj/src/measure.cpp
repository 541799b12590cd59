#include "quadrec/measure.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "quadrec/kernels.hpp"
#include "quadrec/linalg.hpp"
#include "quadrec/rng.hpp"

namespace quadrec {

Ensemble Ensemble::standard_gaussian(std::size_t n) {
  Ensemble e;
  e.kind = Kind::standard_gaussian;
  e.n = n;
  return e;
}

Ensemble Ensemble::gaussian_cov(Matrix sigma) {
  if (sigma.rows != sigma.cols) throw std::invalid_argument("gaussian_cov: covariance must be square");
  Ensemble e;
  e.kind = Kind::gaussian_cov;
  e.n = sigma.rows;
  e.sigma = std::move(sigma);
  return e;
}

Ensemble Ensemble::bernoulli(std::size_t n) {
  Ensemble e;
  e.kind = Kind::bernoulli;
  e.n = n;
  return e;
}

Ensemble Ensemble::sparse_gaussian(std::size_t n, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("sparse_gaussian: p must be in (0,1]");
  Ensemble e;
  e.kind = Kind::sparse_gaussian;
  e.n = n;
  e.sparse_p = p;
  return e;
}

Matrix Ensemble::covariance() const {
  switch (kind) {
    case Kind::gaussian_cov:
      return sigma;
    case Kind::sparse_gaussian: {
      Matrix c = Matrix::identity(n);
      scale(c, sparse_p);
      return c;
    }
    default:
      return Matrix::identity(n);
  }
}

std::string Ensemble::name() const {
  switch (kind) {
    case Kind::standard_gaussian: return "standard-gaussian";
    case Kind::gaussian_cov: return "gaussian-cov";
    case Kind::bernoulli: return "bernoulli";
    case Kind::sparse_gaussian: return "sparse-gaussian";
  }
  return "?";
}

Matrix draw(const Ensemble& ensemble, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("draw: need m >= 1");
  const std::size_t n = ensemble.n;
  Rng rng(seed);
  Matrix a(n, m);

  switch (ensemble.kind) {
    case Ensemble::Kind::standard_gaussian: {
      for (std::size_t i = 0; i < m; ++i) {
        double* col = a.col(i);
        for (std::size_t k = 0; k < n; ++k) col[k] = rng.gaussian();
      }
      break;
    }
    case Ensemble::Kind::gaussian_cov: {
      const Matrix chol = cholesky(ensemble.sigma);  // throws if not SPD
      std::vector<double> g(n);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < n; ++k) g[k] = rng.gaussian();
        double* col = a.col(i);
        // a = L * g, L lower triangular
        for (std::size_t k = 0; k < n; ++k) kernels::axpy(g[k], chol.col(k), col, n);
      }
      break;
    }
    case Ensemble::Kind::bernoulli: {
      for (std::size_t i = 0; i < m; ++i) {
        double* col = a.col(i);
        for (std::size_t k = 0; k < n; ++k) col[k] = (rng.next_u64() >> 63) ? 1.0 : -1.0;
      }
      break;
    }
    case Ensemble::Kind::sparse_gaussian: {
      for (std::size_t i = 0; i < m; ++i) {
        double* col = a.col(i);
        for (std::size_t k = 0; k < n; ++k) {
          const double u = rng.uniform01();
          col[k] = (u < ensemble.sparse_p) ? rng.gaussian() : 0.0;
        }
      }
      break;
    }
  }
  return a;
}

std::vector<double> measure(const Factor& x, const Matrix& vectors) {
  if (x.rows != vectors.rows) throw std::invalid_argument("measure: dimension mismatch");
  if (!x.is_finite() || !vectors.is_finite()) throw std::invalid_argument("measure: non-finite input");
  const std::size_t m = vectors.cols, n = x.rows, r = x.cols;
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = vectors.col(i);
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double p = kernels::dot(a, x.col(k), n);
      s += p * p;
    }
    y[i] = s;
  }
  return y;
}

MeasurementSet measure_set(const Factor& x, const Matrix& vectors) {
  MeasurementSet data;
  data.values = measure(x, vectors);
  data.vectors = vectors;
  return data;
}

std::vector<double> add_noise(const std::vector<double>& clean, const NoiseSpec& spec,
                              std::uint64_t seed) {
  if (spec.mu < 0.0) throw std::invalid_argument("add_noise: mu must be >= 0");
  if (clean.empty()) throw std::invalid_argument("add_noise: empty measurement vector");
  if (spec.mu == 0.0) return clean;

  double target;
  if (spec.norm == NoiseNorm::vector) {
    target = spec.mu * std::sqrt(kernels::sum_sq(clean.data(), clean.size()));
  } else {
    double s = 0.0;
    for (double v : clean) s += v;
    target = spec.mu * std::fabs(s);
  }

  Rng rng(seed);
  std::vector<double> eta(clean.size());
  for (double& e : eta) e = rng.uniform_pm1();
  const double norm = std::sqrt(kernels::sum_sq(eta.data(), eta.size()));
  if (norm == 0.0) throw NumericalError("add_noise: degenerate noise draw");
  kernels::scal(target / norm, eta.data(), eta.size());

  std::vector<double> noisy = clean;
  kernels::axpy(1.0, eta.data(), noisy.data(), noisy.size());
  return noisy;
}

MeasurementSet add_noise(const MeasurementSet& clean, const NoiseSpec& spec, std::uint64_t seed) {
  MeasurementSet out;
  out.vectors = clean.vectors;
  out.clean_values = clean.values;
  out.values = add_noise(clean.values, spec, seed);
  return out;
}

SketchAccumulator make_sketch_accumulator(Matrix sensing) {
  SketchAccumulator acc;
  acc.sums.assign(sensing.cols, 0.0);
  acc.sensing = std::move(sensing);
  return acc;
}

void sketch_ingest(SketchAccumulator& acc, const std::vector<double>& x) {
  if (x.size() != acc.sensing.rows) throw std::invalid_argument("sketch_ingest: dimension mismatch");
  const std::size_t k_count = acc.sensing.cols;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double p = kernels::dot(acc.sensing.col(k), x.data(), x.size());
    acc.sums[k] += p * p;
  }
  acc.count += 1;
}

MeasurementSet sketch_finalize(const SketchAccumulator& acc) {
  if (acc.count == 0) throw std::invalid_argument("sketch_finalize: no vectors ingested");
  MeasurementSet data;
  data.vectors = acc.sensing;
  data.values = acc.sums;
  const double inv = 1.0 / static_cast<double>(acc.count);
  kernels::scal(inv, data.values.data(), data.values.size());
  return data;
}

double estimate_mu4(const Ensemble& ensemble, std::size_t samples, std::uint64_t seed) {
  if (samples < 10000) throw std::invalid_argument("estimate_mu4: need at least 1e4 samples");
  const std::size_t n = ensemble.n;
  const Matrix a = draw(ensemble, samples, seed);

  // Whitening: identity for unit-covariance kinds, 1/sqrt(p) for sparse,
  // Sigma^{-1/2} for general covariance.
  double acc = 0.0;
  if (ensemble.kind == Ensemble::Kind::gaussian_cov) {
    const Matrix w = sym_sqrt_inv(ensemble.sigma);
    std::vector<double> ai(n), b;
    for (std::size_t i = 0; i < samples; ++i) {
      ai.assign(a.col(i), a.col(i) + n);
      b = matvec(w, ai);
      for (double v : b) acc += (v * v) * (v * v);
    }
  } else {
    const double s = ensemble.kind == Ensemble::Kind::sparse_gaussian
                         ? 1.0 / std::sqrt(ensemble.sparse_p)
                         : 1.0;
    for (double v : a.data) {
      const double b = s * v;
      acc += (b * b) * (b * b);
    }
  }
  return acc / static_cast<double>(samples * n);
}

void save_measurements_csv(const MeasurementSet& data, std::ostream& out) {
  const std::size_t m = data.m(), n = data.n();
  out << "i,y";
  for (std::size_t k = 1; k <= n; ++k) out << ",a_" << k;
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < m; ++i) {
    out << i;
    std::snprintf(buf, sizeof buf, "%.17g", data.values[i]);
    out << "," << buf;
    const double* a = data.vectors.col(i);
    for (std::size_t k = 0; k < n; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", a[k]);
      out << "," << buf;
    }
    out << "\n";
  }
}

void save_measurements_csv(const MeasurementSet& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_measurements_csv(data, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

MeasurementSet load_measurements_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("measurement csv: empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "i" || header[1] != "y")
    throw std::runtime_error("measurement csv: bad header, expected i,y,a_1,...");
  const std::size_t n = header.size() - 2;

  std::vector<std::vector<double>> rows;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != n + 2)
      throw std::runtime_error("measurement csv: row has wrong column count");
    values.push_back(std::stod(fields[1]));
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = std::stod(fields[k + 2]);
    rows.push_back(std::move(a));
  }
  if (rows.empty()) throw std::runtime_error("measurement csv: no data rows");

  MeasurementSet data;
  data.vectors = Matrix(n, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < n; ++k) data.vectors(k, i) = rows[i][k];
  data.values = std::move(values);
  return data;
}

MeasurementSet load_measurements_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return load_measurements_csv(in);
}

std::vector<std::vector<double>> load_vector_stream(std::istream& in, std::size_t n) {
  std::vector<std::vector<double>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<double> x;
    double v;
    while (ls >> v) x.push_back(v);
    if (x.size() != n)
      throw std::runtime_error("vector stream: expected " + std::to_string(n) + " entries per line");
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace quadrec
