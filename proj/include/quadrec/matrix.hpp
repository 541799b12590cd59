// Dense column-major matrix of doubles. Small enough on purpose: the library
// works on n <= ~10^3 factors and nr <= 2000 Hessians, all dense.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace quadrec {

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;  // column-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[j * rows + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data[j * rows + i]; }
  double* col(std::size_t j) { return data.data() + j * rows; }
  const double* col(std::size_t j) const { return data.data() + j * rows; }

  static Matrix identity(std::size_t n);
  bool is_finite() const;
};

// A factor is just an n-by-r matrix (n >= r >= 1): the optimization variable
// U or the ground truth X.
using Factor = Matrix;

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);        // a * b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);   // a^T * b
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
void add_scaled(Matrix& a, double alpha, const Matrix& b);  // a += alpha*b
void scale(Matrix& a, double alpha);

std::vector<double> matvec(const Matrix& a, const std::vector<double>& x);    // a * x
std::vector<double> matvec_t(const Matrix& a, const std::vector<double>& x);  // a^T * x

double frobenius_sq(const Matrix& a);
double frobenius(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Plain-text factor format: first line "rows cols", then `rows` lines of
// `cols` space-separated decimals at 17 significant digits (exact round trip).
void save_matrix(const Matrix& a, std::ostream& out);
void save_matrix(const Matrix& a, const std::string& path);
Matrix load_matrix(std::istream& in);
Matrix load_matrix(const std::string& path);

}  // namespace quadrec
