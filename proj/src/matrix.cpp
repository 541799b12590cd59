#include "quadrec/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "quadrec/kernels.hpp"

namespace quadrec {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::is_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t j = 0; j < a.cols; ++j)
    for (std::size_t i = 0; i < a.rows; ++i) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: dimension mismatch");
  Matrix c(a.rows, b.cols);
  for (std::size_t j = 0; j < b.cols; ++j) {
    double* cj = c.col(j);
    for (std::size_t k = 0; k < a.cols; ++k) {
      kernels::axpy(b(k, j), a.col(k), cj, a.rows);
    }
  }
  return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_at_b: dimension mismatch");
  Matrix c(a.cols, b.cols);
  for (std::size_t j = 0; j < b.cols; ++j)
    for (std::size_t i = 0; i < a.cols; ++i) c(i, j) = kernels::dot(a.col(i), b.col(j), a.rows);
  return c;
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  add_scaled(c, 1.0, b);
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  add_scaled(c, -1.0, b);
  return c;
}

void add_scaled(Matrix& a, double alpha, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("add_scaled: shape mismatch");
  kernels::axpy(alpha, b.data.data(), a.data.data(), a.data.size());
}

void scale(Matrix& a, double alpha) { kernels::scal(alpha, a.data.data(), a.data.size()); }

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
  if (x.size() != a.cols) throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t j = 0; j < a.cols; ++j) kernels::axpy(x[j], a.col(j), y.data(), a.rows);
  return y;
}

std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x) {
  if (x.size() != a.rows) throw std::invalid_argument("matvec_t: dimension mismatch");
  std::vector<double> y(a.cols);
  for (std::size_t j = 0; j < a.cols; ++j) y[j] = kernels::dot(a.col(j), x.data(), a.rows);
  return y;
}

double frobenius_sq(const Matrix& a) { return kernels::sum_sq(a.data.data(), a.data.size()); }

double frobenius(const Matrix& a) { return std::sqrt(frobenius_sq(a)); }

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  return m;
}

void save_matrix(const Matrix& a, std::ostream& out) {
  out << a.rows << " " << a.cols << "\n";
  char buf[40];
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
      out << buf << (j + 1 == a.cols ? "" : " ");
    }
    out << "\n";
  }
}

void save_matrix(const Matrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_matrix(a, out);
}

Matrix load_matrix(std::istream& in) {
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw std::runtime_error("matrix load: bad header");
  Matrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (!(in >> a(i, j))) throw std::runtime_error("matrix load: truncated data");
  return a;
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return load_matrix(in);
}

}  // namespace quadrec
