#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bgk1d/core.hpp"

namespace bgk1d {

// Identifies an independent draw sequence. Streams are keyed per (cell, step)
// so per-cell work can run in any order (or in parallel) and still reproduce
// the serial result bit for bit. `salt` separates phases within a step.
struct StreamId {
  std::int64_t cell = 0;
  std::int64_t step = 0;
  std::int64_t salt = 0;
};

// Phase salts used across the solvers. Any fixed distinct values work; they
// are part of the reproducibility contract once outputs are frozen.
namespace stream_salt {
inline constexpr std::int64_t init = 1;
inline constexpr std::int64_t equilibrium_sampling = 2;
inline constexpr std::int64_t relaxation = 3;
inline constexpr std::int64_t boundary = 4;
inline constexpr std::int64_t residual = 5;
inline constexpr std::int64_t matching = 6;
}  // namespace stream_salt

// Small counter-seeded generator (xoshiro256++ state expanded from the key
// with splitmix64). Identical (seed, id) always yields the identical
// sequence, independent of platform or standard library.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId id);

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53 random bits.
  double uniform01();
  // Standard normal via Box-Muller on the stream; pairs are cached.
  double gaussian();
  // Uniform integer in [0, n), unbiased (rejection).
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stochastic rounding: floor(x) + 1 with probability x - floor(x). The
// expectation equals x, which keeps particle counts unbiased.
long long iround(double x, RngStream& rng);

// n i.i.d. draws from the Maxwellian (normal with mean u, variance T).
std::vector<double> sample_maxwellian(const MaxwellianParams& M, std::size_t n,
                                      RngStream& rng);

// Affine transform v -> (v - mu1)/c + m1 with c = sqrt((mu2 - mu1^2)/(m2 - m1^2)),
// making the sample mean exactly m1 and the sample second moment exactly m2.
// Throws MatchingError when the input variance or the target variance is not
// positive (callers fall back to resampling or skip).
void moment_match(std::span<double> velocities, double m1, double m2);

struct ScaledMaxwellian {
  double coef = 1.0;  // nonnegative scale applied to the Maxwellian
  MaxwellianParams m;
};

struct RatioMinResult {
  double min_value = 0.0;
  double argmin_v = 0.0;
};

// Minimum over [a, b] of a ratio of Maxwellians. For a single numerator term
// the minimum is exact: the log-ratio is a quadratic in v, so the candidates
// are the vertex (when it is a true minimum inside the interval) and the two
// endpoints. For two terms the result is min over terms of each term's exact
// ratio minimum, which is a guaranteed lower bound of the ratio of any
// pointwise convex combination of the terms -- never an overestimate.
RatioMinResult min_ratio_maxwellians(std::span<const ScaledMaxwellian> numer,
                                     const MaxwellianParams& denom, double a, double b);

struct AcceptRejectResult {
  std::vector<double> velocities;
  long long clamp_count = 0;  // acceptance probabilities clamped into [0, 1]
};

// Samples n velocities from the residual distribution (Mhat - beta_c M_H) /
// (1 - beta_c): draw a source particle uniformly with replacement, keep it
// with probability 1 - beta_c M_H(v) / Mhat(v), retry until n are accepted.
// Probabilities outside [0, 1] beyond 1e-9 are clamped and counted (they
// signal a beta_c overestimate). Throws if the estimated acceptance
// probability over the source set is below 1e-6.
AcceptRejectResult accept_reject_residual(std::span<const double> source,
                                          const std::function<double(double)>& source_density,
                                          std::size_t n, double beta_c,
                                          const MaxwellianParams& mh, RngStream& rng);

}  // namespace bgk1d
