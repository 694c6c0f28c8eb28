#include "bgk1d/core.hpp"

#include <sstream>

namespace bgk1d {

namespace detail {

double std_normal_pdf(double z) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace detail

Primitives primitives_from_conserved(const ConservedMoments& U, int d, int cell) {
  auto fail = [cell](const char* what, double value) {
    std::ostringstream os;
    os << "invalid state: " << what << " = " << value;
    if (cell >= 0) os << " in cell " << cell;
    throw InvalidStateError(os.str());
  };
  if (!(U.rho > 0.0)) fail("rho", U.rho);
  Primitives pr;
  pr.rho = U.rho;
  pr.u = U.mom / U.rho;
  pr.T = (2.0 * U.energy / U.rho - pr.u * pr.u) / static_cast<double>(d);
  if (!(pr.T > 0.0)) fail("T", pr.T);
  pr.p = pr.rho * pr.T;
  return pr;
}

ConservedMoments conserved_from_primitives(double rho, double u, double T, int d) {
  ConservedMoments U;
  U.rho = rho;
  U.mom = rho * u;
  U.energy = 0.5 * d * rho * T + 0.5 * rho * u * u;
  return U;
}

MaxwellianParams maxwellian_params(const ConservedMoments& U, int d, int cell) {
  Primitives pr = primitives_from_conserved(U, d, cell);
  return {pr.rho, pr.u, pr.T};
}

ConservedMoments conserved_from_maxwellian(const MaxwellianParams& M, int d) {
  return conserved_from_primitives(M.rho, M.u, M.T, d);
}

double eval_maxwellian(const MaxwellianParams& M, double v) {
  double dv = M.u - v;
  return M.rho / std::sqrt(2.0 * M_PI * M.T) * std::exp(-dv * dv / (2.0 * M.T));
}

double maxwellian_half_moment(const MaxwellianParams& M, int k, bool positive_half) {
  if (k < 0 || k > 3) throw ArgumentError("maxwellian_half_moment: k out of range");
  double s = std::sqrt(M.T);
  double z = M.u / s;
  double phi = detail::std_normal_pdf(z);
  double Phi = detail::std_normal_cdf(z);
  double u = M.u;
  double pos = 0.0;
  switch (k) {
    case 0:
      pos = Phi;
      break;
    case 1:
      pos = u * Phi + s * phi;
      break;
    case 2:
      pos = (u * u + s * s) * Phi + u * s * phi;
      break;
    case 3:
      pos = (u * u * u + 3.0 * u * s * s) * Phi + (u * u + 2.0 * s * s) * s * phi;
      break;
  }
  pos *= M.rho;
  if (positive_half) return pos;
  // Full-line moments of the Gaussian, minus the positive half.
  double full = 0.0;
  switch (k) {
    case 0:
      full = 1.0;
      break;
    case 1:
      full = u;
      break;
    case 2:
      full = u * u + s * s;
      break;
    case 3:
      full = u * u * u + 3.0 * u * s * s;
      break;
  }
  return M.rho * full - pos;
}

double maxwellian_inward_flux(const MaxwellianParams& M, bool from_right) {
  if (from_right) {
    // integral over v < 0 of |v| M dv = -(negative-half first moment)
    return -maxwellian_half_moment(M, 1, false);
  }
  return maxwellian_half_moment(M, 1, true);
}

Grid1D Grid1D::make(double x_min, double x_max, int n_cells, BoundarySide left,
                    BoundarySide right) {
  if (n_cells < 2) throw ArgumentError("Grid1D: n_cells must be >= 2");
  if (!(x_max > x_min)) throw ArgumentError("Grid1D: x_max must exceed x_min");
  bool lp = left.kind == BoundaryKind::periodic;
  bool rp = right.kind == BoundaryKind::periodic;
  if (lp != rp) throw ArgumentError("Grid1D: periodic must apply to both sides");
  if (left.kind == BoundaryKind::inflow && !left.reservoir)
    throw ArgumentError("Grid1D: inflow boundary needs a reservoir state");
  if (right.kind == BoundaryKind::inflow && !right.reservoir)
    throw ArgumentError("Grid1D: inflow boundary needs a reservoir state");
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_cells = n_cells;
  g.dx = (x_max - x_min) / n_cells;
  g.left = std::move(left);
  g.right = std::move(right);
  return g;
}

ConservedMoments moments_of_sample_set(std::span<const double> velocities, double mp,
                                       double dx) {
  if (!(mp > 0.0)) throw ArgumentError("moments_of_sample_set: mp must be > 0");
  if (!(dx > 0.0)) throw ArgumentError("moments_of_sample_set: dx must be > 0");
  KahanSum sv, sv2;
  for (double v : velocities) {
    sv.add(v);
    sv2.add(v * v);
  }
  double w = mp / dx;
  ConservedMoments U;
  U.rho = static_cast<double>(velocities.size()) * w;
  U.mom = w * sv.value();
  U.energy = 0.5 * w * sv2.value();
  return U;
}

}  // namespace bgk1d
