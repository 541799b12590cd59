#include "quadrec/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "quadrec/kernels.hpp"
#include "quadrec/linalg.hpp"

namespace quadrec {

namespace {

void require_factor(const QuadraticLoss& loss, const Factor& u, const char* who) {
  if (u.rows != loss.n || u.cols != loss.r)
    throw std::invalid_argument(std::string(who) + ": factor shape does not match loss");
}

}  // namespace

QuadraticLoss make_loss(MeasurementSet data, std::size_t r) {
  if (r < 1 || r > data.n()) throw std::invalid_argument("make_loss: need 1 <= r <= n");
  if (data.m() < 1) throw std::invalid_argument("make_loss: need at least one measurement");
  if (data.values.size() != data.m()) throw std::invalid_argument("make_loss: values/vectors mismatch");
  QuadraticLoss loss;
  loss.n = data.n();
  loss.r = r;
  loss.data = std::move(data);
  return loss;
}

double value(const QuadraticLoss& loss, const Factor& u) {
  require_factor(loss, u, "value");
  const std::size_t m = loss.data.m(), n = loss.n, r = loss.r;
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = loss.data.vectors.col(i);
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double p = kernels::dot(a, u.col(k), n);
      s += p * p;
    }
    const double resid = loss.data.values[i] - s;
    acc += resid * resid;
  }
  return acc / (4.0 * static_cast<double>(m));
}

double value_and_gradient(const QuadraticLoss& loss, const Factor& u, Factor& grad_out) {
  require_factor(loss, u, "value_and_gradient");
  const std::size_t m = loss.data.m(), n = loss.n, r = loss.r;
  if (grad_out.rows != n || grad_out.cols != r) grad_out = Matrix(n, r);
  std::fill(grad_out.data.begin(), grad_out.data.end(), 0.0);

  double acc = 0.0;
  std::vector<double> p(r);
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = loss.data.vectors.col(i);
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      p[k] = kernels::dot(a, u.col(k), n);
      s += p[k] * p[k];
    }
    const double rho = s - loss.data.values[i];  // a^T U U^T a - y
    acc += rho * rho;
    for (std::size_t k = 0; k < r; ++k) kernels::axpy(rho * p[k], a, grad_out.col(k), n);
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  scale(grad_out, inv_m);
  return acc * 0.25 * inv_m;
}

Factor gradient(const QuadraticLoss& loss, const Factor& u) {
  Factor g;
  value_and_gradient(loss, u, g);
  return g;
}

double hessian_quadform(const QuadraticLoss& loss, const Factor& u, const Factor& w) {
  require_factor(loss, u, "hessian_quadform");
  require_factor(loss, w, "hessian_quadform");
  const std::size_t m = loss.data.m(), n = loss.n, r = loss.r;
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = loss.data.vectors.col(i);
    double s_u = 0.0, s_w = 0.0, cross = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double pu = kernels::dot(a, u.col(k), n);
      const double pw = kernels::dot(a, w.col(k), n);
      s_u += pu * pu;
      s_w += pw * pw;
      cross += pu * pw;
    }
    acc += (s_u - loss.data.values[i]) * s_w + 2.0 * cross * cross;
  }
  return acc / static_cast<double>(m);
}

Matrix hessian_dense(const QuadraticLoss& loss, const Factor& u) {
  require_factor(loss, u, "hessian_dense");
  const std::size_t m = loss.data.m(), n = loss.n, r = loss.r;
  if (n * r > 2000) throw std::invalid_argument("hessian_dense: nr > 2000");

  const std::size_t dim = n * r;
  Matrix h(dim, dim);
  std::vector<double> p(r);
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = loss.data.vectors.col(i);
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      p[k] = kernels::dot(a, u.col(k), n);
      s += p[k] * p[k];
    }
    const double rho = s - loss.data.values[i];
    for (std::size_t l = 0; l < r; ++l) {
      for (std::size_t k = 0; k < r; ++k) {
        const double c = 2.0 * p[k] * p[l] + (k == l ? rho : 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          kernels::axpy(c * a[j], a, h.col(l * n + j) + k * n, n);
        }
      }
    }
  }
  scale(h, 1.0 / static_cast<double>(m));
  // exact symmetry: mirror the upper triangle
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = j + 1; i < dim; ++i) h(i, j) = h(j, i);
  return h;
}

Matrix expected_hessian_rank_r(const GroundTruth& truth, const Factor& u) {
  const std::size_t n = truth.x.rows, r = truth.x.cols;
  if (u.rows != n || u.cols != r)
    throw std::invalid_argument("expected_hessian_rank_r: shape mismatch");

  // UU^T - XX^T and the Frobenius gap, shared by every diagonal block.
  Matrix gram_gap(n, n);
  for (std::size_t k = 0; k < r; ++k) {
    kernels::syr(1.0, u.col(k), n, gram_gap.data.data());
    kernels::syr(-1.0, truth.x.col(k), n, gram_gap.data.data());
  }
  const double fro_gap = frobenius_sq(u) - frobenius_sq(truth.x);

  const std::size_t dim = n * r;
  Matrix h(dim, dim);
  for (std::size_t l = 0; l < r; ++l) {
    for (std::size_t k = 0; k < r; ++k) {
      const double ip = kernels::dot(u.col(k), u.col(l), n);
      for (std::size_t j = 0; j < n; ++j) {
        double* col = h.col(l * n + j) + k * n;
        // 2 u_k u_l^T + 2 u_l u_k^T + 2 (u_k^T u_l) Id
        kernels::axpy(2.0 * u(j, l), u.col(k), col, n);
        kernels::axpy(2.0 * u(j, k), u.col(l), col, n);
        col[j] += 2.0 * ip;
        if (k == l) {
          kernels::axpy(2.0, gram_gap.col(j), col, n);
          col[j] += fro_gap;
        }
      }
    }
  }
  return h;
}

Matrix expected_hessian_rank1(const std::vector<double>& u, const std::vector<double>& x,
                              const Matrix& sigma, double mu4) {
  const std::size_t n = u.size();
  if (x.size() != n || sigma.rows != n || sigma.cols != n)
    throw std::invalid_argument("expected_hessian_rank1: shape mismatch");

  const std::vector<double> su = matvec(sigma, u);
  const std::vector<double> sx = matvec(sigma, x);
  const double usu = kernels::dot(u.data(), su.data(), n);   // ||S u||^2 = u^T Sigma u
  const double xsx = kernels::dot(x.data(), sx.data(), n);

  Matrix h = sigma;
  scale(h, 3.0 * usu - xsx);
  kernels::syr(6.0, su.data(), n, h.data.data());
  kernels::syr(-2.0, sx.data(), n, h.data.data());

  if (mu4 != 3.0) {
    const Matrix root = sym_sqrt(sigma);
    for (std::size_t k = 0; k < n; ++k) {
      const double* vk = root.col(k);
      const double vu = kernels::dot(vk, u.data(), n);
      const double vx = kernels::dot(vk, x.data(), n);
      kernels::syr((mu4 - 3.0) * (3.0 * vu * vu - vx * vx), vk, n, h.data.data());
    }
  }
  return h;
}

double CurvaturePolynomial::identity_residual(double t) const {
  if (per_sample_ab.empty()) return 0.0;
  double mean_z = 0.0, mean_b2 = 0.0;
  for (const auto& [a, b] : per_sample_ab) {
    const double z = a * t + b;
    mean_z += z * z;
    mean_b2 += b * b;
  }
  const double inv_m = 1.0 / static_cast<double>(per_sample_ab.size());
  return std::fabs(3.0 * mean_z * inv_m - mean_b2 * inv_m - (*this)(t));
}

CurvaturePolynomial curvature_polynomial(const QuadraticLoss& loss, const GroundTruth& truth,
                                         const Factor& w_hat) {
  require_factor(loss, w_hat, "curvature_polynomial");
  if (truth.x.rows != loss.n || truth.x.cols != loss.r)
    throw std::invalid_argument("curvature_polynomial: truth shape mismatch");
  if (std::fabs(frobenius(w_hat) - 1.0) > 1e-8)
    throw std::invalid_argument("curvature_polynomial: direction must have unit Frobenius norm");

  const std::size_t m = loss.data.m(), n = loss.n, r = loss.r;
  CurvaturePolynomial poly;
  poly.per_sample_ab.reserve(m);
  double sa2 = 0.0, sab = 0.0, sb2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* av = loss.data.vectors.col(i);
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double pw = kernels::dot(av, w_hat.col(k), n);
      const double px = kernels::dot(av, truth.x.col(k), n);
      a += pw * pw;
      b += px * pw;
    }
    poly.per_sample_ab.emplace_back(a, b);
    sa2 += a * a;
    sab += a * b;
    sb2 += b * b;
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  poly.c2 = 3.0 * sa2 * inv_m;
  poly.c1 = 6.0 * sab * inv_m;
  poly.c0 = 2.0 * sb2 * inv_m;
  return poly;
}

}  // namespace quadrec
