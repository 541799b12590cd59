// Seeded, counter-style random streams. Each (seed, stream) pair yields an
// independent deterministic sequence, so parallel experiment trials can each
// own a stream and results never depend on scheduling. Gaussian variates use
// inverse-transform sampling (rational approximation of the normal quantile
// plus one Halley refinement), so a seed pins the dataset within a build.
#pragma once

#include <array>
#include <cstdint>

namespace quadrec {

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // uniform on (0, 1), strictly inside the open interval
  double uniform01();

  // uniform on [-1, 1), mean zero
  double uniform_pm1();

  // standard normal via inverse CDF
  double gaussian();

 private:
  std::array<std::uint64_t, 4> s_;
};

// Inverse of the standard normal CDF, accurate to ~1e-15 for p in (0,1).
double normal_quantile(double p);

// Derives a child seed for (seed, stream); used to key per-trial streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace quadrec
