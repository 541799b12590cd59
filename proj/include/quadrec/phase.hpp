// Complex phase retrieval through the real rank-2 embedding: z = x + iw maps
// to Z = [[x, w], [-w, x]] in R^{2n x 2}, and intensities |a^T z|^2 become
// quadratic measurements of Z against the stacked vector [Re a; Im a].
// The pairing a^T z is bilinear (no conjugation), which is what makes the
// embedding identity exact with this block layout.
#pragma once

#include <cstdint>
#include <vector>

#include "quadrec/core.hpp"
#include "quadrec/measure.hpp"
#include "quadrec/recover.hpp"

namespace quadrec {

struct ComplexSignal {
  std::vector<double> re, im;
  std::size_t n() const { return re.size(); }
};

// The 2n-by-2 block factor; its columns are orthogonal with common norm ||z||.
Factor embed_signal(const ComplexSignal& z);

// [a_re; a_im]
std::vector<double> embed_measurement(const std::vector<double>& a_re,
                                      const std::vector<double>& a_im);

// m complex sensing vectors with Re, Im ~ N(0, Id/2), stacked as 2n-by-m.
Matrix draw_complex_sensing(std::size_t n, std::size_t m, std::uint64_t seed);

// Least-squares projection of a recovered 2n-by-2 factor onto the embedded
// structure subspace: x = (top(col0) + bottom(col1))/2, w = (top(col1) -
// bottom(col0))/2.
ComplexSignal extract_signal(const Factor& z_mat);
Factor structure_project(const Factor& z_mat);

// min over the phase theta of ||e^{i theta} z - est||_2; if conjugating z
// does better, that error is returned and *conjugated set.
double phase_aligned_error(const ComplexSignal& z, const ComplexSignal& est,
                           bool* conjugated = nullptr);

struct ComplexRecovery {
  ComplexSignal z_hat;
  Trace trace;
  bool orientation_flipped = false;  // recovered factor had det(O) = -1
  bool conjugated = false;           // valid when truth was supplied
  double phase_error = 0.0;          // NaN when truth unknown
};

// Algorithm 1 with r = 2 on the 2n-dimensional embedded data, then structure
// projection. `data` must live in an even dimension 2n.
ComplexRecovery recover_complex(const MeasurementSet& data, std::size_t n,
                                const DescentConfig* cfg = nullptr,
                                const ComplexSignal* truth = nullptr);

}  // namespace quadrec
