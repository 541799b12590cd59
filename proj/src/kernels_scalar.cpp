#include "quadrec/kernels.hpp"

#include <cmath>

namespace quadrec::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s = std::fma(x[i], y[i], s);
  return s;
}

double sum_sq(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s = std::fma(x[i], x[i], s);
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void scal(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void syr(double alpha, const double* x, std::size_t n, double* a) {
  for (std::size_t j = 0; j < n; ++j) {
    const double c = alpha * x[j];
    double* col = a + j * n;
    for (std::size_t i = 0; i < n; ++i) col[i] = std::fma(c, x[i], col[i]);
  }
}

}  // namespace quadrec::kernels::scalar
