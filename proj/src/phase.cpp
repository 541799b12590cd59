#include "quadrec/phase.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadrec/kernels.hpp"
#include "quadrec/rng.hpp"

namespace quadrec {

Factor embed_signal(const ComplexSignal& z) {
  const std::size_t n = z.n();
  if (z.im.size() != n) throw std::invalid_argument("embed_signal: re/im length mismatch");
  Factor mat(2 * n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    mat(i, 0) = z.re[i];
    mat(n + i, 0) = -z.im[i];
    mat(i, 1) = z.im[i];
    mat(n + i, 1) = z.re[i];
  }
  return mat;
}

std::vector<double> embed_measurement(const std::vector<double>& a_re,
                                      const std::vector<double>& a_im) {
  if (a_re.size() != a_im.size()) throw std::invalid_argument("embed_measurement: length mismatch");
  std::vector<double> out;
  out.reserve(2 * a_re.size());
  out.insert(out.end(), a_re.begin(), a_re.end());
  out.insert(out.end(), a_im.begin(), a_im.end());
  return out;
}

Matrix draw_complex_sensing(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(2 * n, m);
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* col = a.col(i);
    for (std::size_t k = 0; k < 2 * n; ++k) col[k] = s * rng.gaussian();
  }
  return a;
}

ComplexSignal extract_signal(const Factor& z_mat) {
  if (z_mat.cols != 2 || z_mat.rows % 2 != 0)
    throw std::invalid_argument("extract_signal: need a 2n-by-2 factor");
  const std::size_t n = z_mat.rows / 2;
  ComplexSignal z;
  z.re.resize(n);
  z.im.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    z.re[i] = 0.5 * (z_mat(i, 0) + z_mat(n + i, 1));
    z.im[i] = 0.5 * (z_mat(i, 1) - z_mat(n + i, 0));
  }
  return z;
}

Factor structure_project(const Factor& z_mat) { return embed_signal(extract_signal(z_mat)); }

double phase_aligned_error(const ComplexSignal& z, const ComplexSignal& est, bool* conjugated) {
  const std::size_t n = z.n();
  if (est.n() != n || z.im.size() != n || est.im.size() != n)
    throw std::invalid_argument("phase_aligned_error: length mismatch");

  const double nz = kernels::sum_sq(z.re.data(), n) + kernels::sum_sq(z.im.data(), n);
  const double ne = kernels::sum_sq(est.re.data(), n) + kernels::sum_sq(est.im.data(), n);

  // |<z, est>| with the Hermitian pairing, for z and for conj(z).
  const double rr = kernels::dot(z.re.data(), est.re.data(), n);
  const double ii = kernels::dot(z.im.data(), est.im.data(), n);
  const double ri = kernels::dot(z.re.data(), est.im.data(), n);
  const double ir = kernels::dot(z.im.data(), est.re.data(), n);
  const double inner_plain = std::hypot(rr + ii, ri - ir);
  const double inner_conj = std::hypot(rr - ii, ri + ir);

  const double err_plain = std::sqrt(std::max(0.0, nz + ne - 2.0 * inner_plain));
  const double err_conj = std::sqrt(std::max(0.0, nz + ne - 2.0 * inner_conj));
  if (conjugated != nullptr) *conjugated = err_conj < err_plain;
  return std::min(err_plain, err_conj);
}

ComplexRecovery recover_complex(const MeasurementSet& data, std::size_t n,
                                const DescentConfig* cfg, const ComplexSignal* truth) {
  if (data.n() % 2 != 0 || data.n() != 2 * n)
    throw std::invalid_argument("recover_complex: data must live in dimension 2n");

  const QuadraticLoss loss = make_loss(data, 2);
  const InitResult init = spectral_init(data, 2);
  DescentConfig dcfg = cfg != nullptr ? *cfg : default_descent_config(loss, init);
  if (!(dcfg.gamma > 0.0)) dcfg.gamma = default_step_size(init, loss.n);

  GroundTruth embedded_truth;
  const GroundTruth* truth_ptr = nullptr;
  if (truth != nullptr) {
    embedded_truth.x = embed_signal(*truth);
    const double nz = kernels::sum_sq(truth->re.data(), n) + kernels::sum_sq(truth->im.data(), n);
    embedded_truth.eigenvalues = {nz, nz};
    truth_ptr = &embedded_truth;
  }

  DescentResult run = descend(loss, init.u0, dcfg, truth_ptr);

  // The factor is only determined up to O(2); a det = -1 representative is
  // anti-structured and the block averaging would annihilate it. Flip the
  // second column (right-multiply by diag(1,-1), measurement-invariant) when
  // that branch captures more structured mass.
  Factor flipped = run.u;
  for (std::size_t i = 0; i < flipped.rows; ++i) flipped(i, 1) = -flipped(i, 1);
  const double mass_plus = frobenius_sq(structure_project(run.u));
  const double mass_minus = frobenius_sq(structure_project(flipped));

  ComplexRecovery out;
  out.orientation_flipped = mass_minus > mass_plus;
  out.z_hat = extract_signal(out.orientation_flipped ? flipped : run.u);
  out.trace = std::move(run.trace);
  if (truth != nullptr) {
    out.phase_error = phase_aligned_error(*truth, out.z_hat, &out.conjugated);
  } else {
    out.phase_error = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace quadrec
