#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "quadrec/phase.hpp"
#include "quadrec/rng.hpp"

using namespace quadrec;

namespace {

ComplexSignal random_signal(std::size_t n, Rng& rng, bool unit = true) {
  ComplexSignal z;
  z.re.resize(n);
  z.im.resize(n);
  double nrm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z.re[i] = rng.gaussian();
    z.im[i] = rng.gaussian();
    nrm2 += z.re[i] * z.re[i] + z.im[i] * z.im[i];
  }
  if (unit) {
    const double inv = 1.0 / std::sqrt(nrm2);
    for (std::size_t i = 0; i < n; ++i) {
      z.re[i] *= inv;
      z.im[i] *= inv;
    }
  }
  return z;
}

}  // namespace

TEST_CASE("embedding block structure") {
  SUBCASE("real signal gives the block-diagonal pattern") {
    ComplexSignal z{{1.0, 2.0}, {0.0, 0.0}};
    const Factor mat = embed_signal(z);
    REQUIRE(mat.rows == 4);
    CHECK(mat(0, 0) == 1.0);
    CHECK(mat(1, 0) == 2.0);
    CHECK(mat(2, 0) == 0.0);
    CHECK(mat(3, 0) == 0.0);
    CHECK(mat(0, 1) == 0.0);
    CHECK(mat(2, 1) == 1.0);
    CHECK(mat(3, 1) == 2.0);
  }
  SUBCASE("purely imaginary signal") {
    ComplexSignal z{{0.0}, {1.0}};
    const Factor mat = embed_signal(z);
    // columns: [0; -1] and [1; 0]
    CHECK(mat(0, 0) == 0.0);
    CHECK(mat(1, 0) == -1.0);
    CHECK(mat(0, 1) == 1.0);
    CHECK(mat(1, 1) == 0.0);
  }
  SUBCASE("column gram is ||z||^2 Id") {
    Rng rng(3);
    const ComplexSignal z = random_signal(6, rng, false);
    const Factor mat = embed_signal(z);
    const Matrix gram = matmul_at_b(mat, mat);
    double nrm2 = 0.0;
    for (std::size_t i = 0; i < 6; ++i) nrm2 += z.re[i] * z.re[i] + z.im[i] * z.im[i];
    CHECK(gram(0, 0) == doctest::Approx(nrm2).epsilon(1e-12));
    CHECK(gram(1, 1) == doctest::Approx(nrm2).epsilon(1e-12));
    CHECK(std::fabs(gram(0, 1)) <= 1e-12 * nrm2);
  }
}

TEST_CASE("measurement equivalence against the complex-arithmetic oracle") {
  Rng rng(5);
  const std::size_t n = 7;
  for (int trial = 0; trial < 1000; ++trial) {
    const ComplexSignal z = random_signal(n, rng, false);
    std::vector<double> a_re(n), a_im(n);
    for (std::size_t i = 0; i < n; ++i) {
      a_re[i] = rng.gaussian();
      a_im[i] = rng.gaussian();
    }
    const double want = oracles::complex_intensity(z.re, z.im, a_re, a_im);

    const Factor mat = embed_signal(z);
    const std::vector<double> stacked = embed_measurement(a_re, a_im);
    Matrix vectors(2 * n, 1);
    std::copy(stacked.begin(), stacked.end(), vectors.col(0));
    const double got = measure(mat, vectors)[0];
    CHECK(std::fabs(got - want) <= 1e-12 * std::max(1.0, want));
  }

  // a = 0 measures 0; real/real reduces to (a^T x)^2
  const ComplexSignal zr{{0.5, -1.5}, {0.0, 0.0}};
  const std::vector<double> zero(2, 0.0);
  CHECK(oracles::complex_intensity(zr.re, zr.im, zero, zero) == 0.0);
  const std::vector<double> ar{1.0, 2.0};
  const double want = (0.5 - 3.0) * (0.5 - 3.0);
  CHECK(oracles::complex_intensity(zr.re, zr.im, ar, zero) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("phase rotation maps to right-multiplication by a rotation matrix") {
  Rng rng(7);
  const std::size_t n = 5;
  const ComplexSignal z = random_signal(n, rng, false);
  const double theta = 0.77;
  const double c = std::cos(theta), s = std::sin(theta);

  ComplexSignal rotated;
  rotated.re.resize(n);
  rotated.im.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rotated.re[i] = z.re[i] * c - z.im[i] * s;
    rotated.im[i] = z.im[i] * c + z.re[i] * s;
  }

  Matrix rot(2, 2);
  rot(0, 0) = c;
  rot(0, 1) = s;
  rot(1, 0) = -s;
  rot(1, 1) = c;
  const Factor lhs = embed_signal(rotated);
  const Factor rhs = matmul(embed_signal(z), rot);
  CHECK(max_abs_diff(lhs, rhs) <= 1e-15);
}

TEST_CASE("structure projection is idempotent and norm-nonincreasing") {
  Rng rng(9);
  Factor raw(8, 2);
  for (double& v : raw.data) v = rng.gaussian();
  const Factor once = structure_project(raw);
  const Factor twice = structure_project(once);
  CHECK(max_abs_diff(once, twice) == 0.0);
  CHECK(frobenius(once) <= frobenius(raw) + 1e-14);
}

TEST_CASE("procrustes distance equals twice the squared phase error on structured factors") {
  Rng rng(11);
  const std::size_t n = 6;
  const ComplexSignal z = random_signal(n, rng);
  ComplexSignal est = random_signal(n, rng);
  // pull est toward z so the comparison exercises a nontrivial but small error
  for (std::size_t i = 0; i < n; ++i) {
    est.re[i] = z.re[i] + 0.1 * est.re[i];
    est.im[i] = z.im[i] + 0.1 * est.im[i];
  }

  GroundTruth truth;
  truth.x = embed_signal(z);
  double nz2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) nz2 += z.re[i] * z.re[i] + z.im[i] * z.im[i];
  truth.eigenvalues = {nz2, nz2};

  const double d = procrustes_align(truth, embed_signal(est)).distance_sq;
  const double err = phase_aligned_error(z, est);
  CHECK(d == doctest::Approx(2.0 * err * err).epsilon(1e-8));
}

TEST_CASE("phase error detects conjugation") {
  Rng rng(13);
  const ComplexSignal z = random_signal(5, rng);
  ComplexSignal conj = z;
  for (double& v : conj.im) v = -v;
  bool conjugated = false;
  const double err = phase_aligned_error(z, conj, &conjugated);
  CHECK(err <= 1e-12);
  CHECK(conjugated);
}

TEST_CASE("end-to-end complex recovery at a small size") {
  Rng rng(17);
  const std::size_t n = 8, m = 16 * n;
  const ComplexSignal z = random_signal(n, rng);
  const Matrix sensing = draw_complex_sensing(n, m, 18);
  const MeasurementSet data = measure_set(embed_signal(z), sensing);

  DescentConfig cfg;
  cfg.max_iters = 20000;
  cfg.dist_tol = 5e-7;
  const ComplexRecovery rec = recover_complex(data, n, &cfg, &z);
  CHECK(rec.phase_error <= 1e-3);

  MeasurementSet odd;
  odd.vectors = Matrix(5, 3);
  odd.values = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(recover_complex(odd, 2, nullptr, nullptr), std::invalid_argument);
}

TEST_CASE("basis sensing plus gaussian bulk pins entry magnitudes") {
  // real positive z, sensing that includes the basis sweeps e_k
  const std::size_t n = 4, m = 16 * n;
  ComplexSignal z{{0.9, 0.3, 0.2, 0.25}, {0.0, 0.0, 0.0, 0.0}};
  double nrm = 0.0;
  for (double v : z.re) nrm += v * v;
  for (double& v : z.re) v /= std::sqrt(nrm);

  Matrix sensing = draw_complex_sensing(n, m, 19);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < 2 * n; ++i) sensing(i, k) = 0.0;
    sensing(k, k) = 1.0;  // real basis vector e_k
  }
  const MeasurementSet data = measure_set(embed_signal(z), sensing);
  // the basis measurements read off |z_k|^2 exactly
  for (std::size_t k = 0; k < n; ++k)
    CHECK(data.values[k] == doctest::Approx(z.re[k] * z.re[k]).epsilon(1e-12));

  DescentConfig cfg;
  cfg.max_iters = 20000;
  cfg.dist_tol = 5e-7;
  const ComplexRecovery rec = recover_complex(data, n, &cfg, &z);
  for (std::size_t k = 0; k < n; ++k) {
    const double mag = std::hypot(rec.z_hat.re[k], rec.z_hat.im[k]);
    CHECK(mag == doctest::Approx(z.re[k]).epsilon(1e-2));
  }
}
