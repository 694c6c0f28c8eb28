#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgk1d {

// Velocity-space dimension of the implemented solvers. The moment relations
// below keep d explicit so they read the same in any dimension, but all
// shipped solvers run with d = 1 (and one spatial dimension).
inline constexpr int kVelocityDim = 1;

// Effective adiabatic exponent of the d = 1 monatomic closure,
// gamma = (d + 2) / d. Note this is 3, not the familiar 1.4.
inline constexpr double kGammaEff = 3.0;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments to an operation (negative counts, inverted intervals, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A field value violates the physical invariants (rho <= 0, T <= 0).
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

// A solver produced an unphysical update and cannot continue.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

// Moment matching cannot be performed on the given sample set.
class MatchingError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Conserved moments and the local equilibrium
// ---------------------------------------------------------------------------

// Per-cell conserved quantities: mass density, momentum density and total
// energy density. E = d/2 rho T + 1/2 rho u^2, p = rho T.
struct ConservedMoments {
  double rho = 0.0;
  double mom = 0.0;
  double energy = 0.0;

  ConservedMoments() = default;
  ConservedMoments(double rho_, double mom_, double energy_)
      : rho(rho_), mom(mom_), energy(energy_) {}

  ConservedMoments operator+(const ConservedMoments& o) const {
    return {rho + o.rho, mom + o.mom, energy + o.energy};
  }
  ConservedMoments operator-(const ConservedMoments& o) const {
    return {rho - o.rho, mom - o.mom, energy - o.energy};
  }
  ConservedMoments operator*(double s) const {
    return {rho * s, mom * s, energy * s};
  }
  ConservedMoments& operator+=(const ConservedMoments& o) {
    rho += o.rho;
    mom += o.mom;
    energy += o.energy;
    return *this;
  }
  double operator[](int k) const { return k == 0 ? rho : (k == 1 ? mom : energy); }
  double& operator[](int k) { return k == 0 ? rho : (k == 1 ? mom : energy); }
};

// Parameters of the local Maxwellian: density, bulk velocity, temperature.
struct MaxwellianParams {
  double rho = 1.0;
  double u = 0.0;
  double T = 1.0;
};

struct Primitives {
  double rho = 0.0;
  double u = 0.0;
  double T = 0.0;
  double p = 0.0;
};

// u = mom/rho, T = (2 E / rho - u^2) / d, p = rho T.
// Throws InvalidStateError if rho <= 0 or T <= 0; `cell` (when >= 0) is
// included in the message so field-level callers can name the offender.
Primitives primitives_from_conserved(const ConservedMoments& U, int d = kVelocityDim,
                                     int cell = -1);

ConservedMoments conserved_from_primitives(double rho, double u, double T,
                                           int d = kVelocityDim);

// Equilibrium parameters of a cell state (same rho, u, T as the state).
MaxwellianParams maxwellian_params(const ConservedMoments& U, int d = kVelocityDim,
                                   int cell = -1);

ConservedMoments conserved_from_maxwellian(const MaxwellianParams& M,
                                           int d = kVelocityDim);

// The d = 1 local Maxwellian rho (2 pi T)^{-1/2} exp(-(u - v)^2 / (2 T)).
double eval_maxwellian(const MaxwellianParams& M, double v);

// Integral of v^k M(v) dv over the half line (v > 0 or v < 0), k = 0..3.
// Closed form via the standard normal pdf/cdf.
double maxwellian_half_moment(const MaxwellianParams& M, int k, bool positive_half);

// Mass flux of M through a boundary, restricted to the inflowing sign:
// integral of |v| M(v) dv over v < 0 (into a right boundary) or v > 0.
double maxwellian_inward_flux(const MaxwellianParams& M, bool from_right);

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

enum class BoundaryKind { periodic, specular_wall, inflow, free_flow };

struct BoundarySide {
  BoundaryKind kind = BoundaryKind::periodic;
  // Required for inflow; used by free_flow particle injection when present.
  std::optional<ConservedMoments> reservoir;
};

struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n_cells = 0;
  double dx = 0.0;
  BoundarySide left;
  BoundarySide right;

  static Grid1D make(double x_min, double x_max, int n_cells,
                     BoundarySide left = {}, BoundarySide right = {});

  double length() const { return x_max - x_min; }
  double center(int i) const { return x_min + (i + 0.5) * dx; }
  bool periodic() const { return left.kind == BoundaryKind::periodic; }

  // Cell index of a position inside the domain (clamped at the edges so a
  // particle sitting exactly on x_max lands in the last cell).
  int cell_of(double x) const {
    int i = static_cast<int>(std::floor((x - x_min) / dx));
    if (i < 0) i = 0;
    if (i >= n_cells) i = n_cells - 1;
    return i;
  }
};

// ---------------------------------------------------------------------------
// Sample-set moments
// ---------------------------------------------------------------------------

// Compensated (Kahan) accumulator; particle counts reach 1e5-1e6 per run.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Moments of a velocity sample set with uniform particle mass mp in a cell of
// width dx: rho = n mp / dx, mom = mp/dx sum v, energy = mp/dx sum v^2 / 2.
// An empty set yields zero moments (a vacuum cell, valid as data).
ConservedMoments moments_of_sample_set(std::span<const double> velocities, double mp,
                                       double dx);

// Knudsen number configuration; the relaxation frequency is C / epsilon with
// C = 1, constant in space and time.
struct KnudsenConfig {
  double epsilon = 1.0;
  double C = 1.0;
};

namespace detail {
double std_normal_pdf(double z);
double std_normal_cdf(double z);
}  // namespace detail

}  // namespace bgk1d
