#include "bgk1d/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bgk1d {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamId id) {
  std::uint64_t x = seed;
  (void)splitmix64(x);
  x ^= static_cast<std::uint64_t>(id.cell) * 0x9e3779b97f4a7c15ULL;
  (void)splitmix64(x);
  x ^= static_cast<std::uint64_t>(id.step) * 0xd1b54a32d192ed03ULL;
  (void)splitmix64(x);
  x ^= static_cast<std::uint64_t>(id.salt) * 0x8cb92ba72f3d8dd7ULL;
  for (auto& s : s_) s = splitmix64(x);
  bool all_zero = true;
  for (auto s : s_) all_zero = all_zero && s == 0;
  if (all_zero) s_[0] = 0x1234567890abcdefULL;
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] to keep the log finite.
  double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * M_PI * u2;
  spare_ = r * std::sin(angle);
  have_spare_ = true;
  return r * std::cos(angle);
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("uniform_below: n must be positive");
  std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

long long iround(double x, RngStream& rng) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw ArgumentError("iround: argument must be finite and nonnegative");
  double fl = std::floor(x);
  double frac = x - fl;
  long long base = static_cast<long long>(fl);
  if (frac > 0.0 && rng.uniform01() < frac) return base + 1;
  return base;
}

std::vector<double> sample_maxwellian(const MaxwellianParams& M, std::size_t n,
                                      RngStream& rng) {
  if (!(M.rho > 0.0) || !(M.T > 0.0))
    throw InvalidStateError("sample_maxwellian: invalid Maxwellian parameters");
  std::vector<double> out(n);
  double s = std::sqrt(M.T);
  for (std::size_t j = 0; j < n; ++j) out[j] = M.u + s * rng.gaussian();
  return out;
}

void moment_match(std::span<double> velocities, double m1, double m2) {
  if (velocities.size() < 2)
    throw MatchingError("moment_match: need at least two velocities");
  double target_var = m2 - m1 * m1;
  if (!(target_var > 0.0))
    throw MatchingError("moment_match: target variance must be positive");
  KahanSum sv, sv2;
  for (double v : velocities) {
    sv.add(v);
    sv2.add(v * v);
  }
  double n = static_cast<double>(velocities.size());
  double mu1 = sv.value() / n;
  double mu2 = sv2.value() / n;
  double var = mu2 - mu1 * mu1;
  // A variance at rounding level (e.g. a set of near-identical velocities)
  // cannot be rescaled to a finite target; treat it as degenerate.
  if (!(var > 1e-9 * std::max(mu2, 1e-300)))
    throw MatchingError("moment_match: degenerate sample variance");
  double c = std::sqrt(var / target_var);
  for (double& v : velocities) v = (v - mu1) / c + m1;
}

namespace {

// Exact minimum over [a, b] of coef * M1(v) / Md(v). The log of the ratio is
// q(v) = A v^2 + B v + C (plus a constant prefactor), so the minimum sits at
// the vertex when A > 0 and the vertex is inside, otherwise at an endpoint.
RatioMinResult min_single_ratio(double coef, const MaxwellianParams& m1,
                                const MaxwellianParams& md, double a, double b) {
  if (coef == 0.0) return {0.0, a};
  double pref = coef * (m1.rho / md.rho) * std::sqrt(md.T / m1.T);
  double A = 0.5 / md.T - 0.5 / m1.T;
  double B = m1.u / m1.T - md.u / md.T;
  double C = md.u * md.u / (2.0 * md.T) - m1.u * m1.u / (2.0 * m1.T);
  auto value = [&](double v) { return pref * std::exp((A * v + B) * v + C); };

  double best_v = a;
  double best = value(a);
  double vb = value(b);
  if (vb < best) {
    best = vb;
    best_v = b;
  }
  if (A > 0.0) {
    double vertex = -B / (2.0 * A);
    if (vertex > a && vertex < b) {
      double vv = value(vertex);
      if (vv < best) {
        best = vv;
        best_v = vertex;
      }
    }
  }
  return {best, best_v};
}

}  // namespace

RatioMinResult min_ratio_maxwellians(std::span<const ScaledMaxwellian> numer,
                                     const MaxwellianParams& denom, double a, double b) {
  if (!(b > a)) throw ArgumentError("min_ratio_maxwellians: interval must satisfy b > a");
  if (numer.empty() || numer.size() > 2)
    throw ArgumentError("min_ratio_maxwellians: need one or two numerator terms");
  if (!(denom.rho > 0.0) || !(denom.T > 0.0))
    throw InvalidStateError("min_ratio_maxwellians: invalid denominator");
  RatioMinResult best{std::numeric_limits<double>::infinity(), a};
  for (const auto& term : numer) {
    if (term.coef < 0.0)
      throw ArgumentError("min_ratio_maxwellians: negative numerator weight");
    if (term.coef > 0.0 && (!(term.m.rho > 0.0) || !(term.m.T > 0.0)))
      throw InvalidStateError("min_ratio_maxwellians: invalid numerator term");
    RatioMinResult r = min_single_ratio(term.coef, term.m, denom, a, b);
    if (r.min_value < best.min_value) best = r;
  }
  return best;
}

AcceptRejectResult accept_reject_residual(std::span<const double> source,
                                          const std::function<double(double)>& source_density,
                                          std::size_t n, double beta_c,
                                          const MaxwellianParams& mh, RngStream& rng) {
  if (source.empty()) throw ArgumentError("accept_reject_residual: empty source set");
  if (!(beta_c >= 0.0) || !(beta_c <= 1.0))
    throw ArgumentError("accept_reject_residual: beta_c must lie in [0, 1]");
  AcceptRejectResult out;
  out.velocities.reserve(n);
  if (n == 0) return out;

  // Estimated acceptance probability of the procedure over this source set.
  double acc_est = 1.0;
  if (beta_c > 0.0) {
    KahanSum ratio_sum;
    for (double v : source) {
      double mhat = source_density(v);
      if (!(mhat > 0.0))
        throw InvalidStateError("accept_reject_residual: source density nonpositive");
      ratio_sum.add(eval_maxwellian(mh, v) / mhat);
    }
    acc_est = 1.0 - beta_c * ratio_sum.value() / static_cast<double>(source.size());
    if (!(acc_est > 1e-6))
      throw SolverFailure("accept_reject_residual: expected acceptance below 1e-6");
  }

  const double tol = 1e-9;
  std::size_t accepted = 0;
  long long trials = 0;
  const long long max_trials =
      64 + static_cast<long long>(20.0 * static_cast<double>(n) / acc_est);
  while (accepted < n) {
    if (++trials > max_trials)
      throw SolverFailure("accept_reject_residual: trial budget exceeded");
    double v = source[rng.uniform_below(source.size())];
    double p = 1.0;
    if (beta_c > 0.0) {
      double mhat = source_density(v);
      p = 1.0 - beta_c * eval_maxwellian(mh, v) / mhat;
      if (p < -tol || p > 1.0 + tol) ++out.clamp_count;
      p = std::clamp(p, 0.0, 1.0);
    }
    if (p >= 1.0 || rng.uniform01() < p) {
      out.velocities.push_back(v);
      ++accepted;
    }
  }
  return out;
}

}  // namespace bgk1d
