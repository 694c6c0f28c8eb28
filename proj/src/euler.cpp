#include "bgk1d/euler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bgk1d {

namespace {

bool is_vacuum(const ConservedMoments& U) { return !(U.rho > 0.0); }

// |u| + sqrt(gamma_eff T); zero for vacuum cells. Throws when a cell with
// positive density has nonpositive temperature.
double wave_speed(const ConservedMoments& U, int cell) {
  if (is_vacuum(U)) return 0.0;
  double u = U.mom / U.rho;
  double T = 2.0 * U.energy / U.rho - u * u;
  if (!(T > 0.0)) {
    std::ostringstream os;
    os << "euler: nonpositive temperature " << T << " in cell " << cell;
    throw SolverFailure(os.str());
  }
  return std::abs(u) + std::sqrt(kGammaEff * T);
}

ConservedMoments flux_of(const ConservedMoments& U) {
  if (is_vacuum(U)) return {};
  double u = U.mom / U.rho;
  double T = 2.0 * U.energy / U.rho - u * u;
  double p = U.rho * T;
  return {U.mom, U.mom * u + p, (U.energy + p) * u};
}

void validate_update(const std::vector<ConservedMoments>& field) {
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto& U = field[i];
    if (U.rho < 0.0) {
      std::ostringstream os;
      os << "euler: negative density " << U.rho << " in cell " << i;
      throw SolverFailure(os.str());
    }
    if (U.rho > 0.0) {
      double internal = U.energy - U.mom * U.mom / (2.0 * U.rho);
      if (!(internal > 0.0)) {
        std::ostringstream os;
        os << "euler: nonpositive internal energy in cell " << i;
        throw SolverFailure(os.str());
      }
    }
  }
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return a > 0.0 ? std::min(a, b) : std::max(a, b);
}

double mc_limit(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  double c = 0.5 * (a + b);
  double lim = 2.0 * (a > 0.0 ? std::min(a, b) : std::max(a, b));
  return a > 0.0 ? std::min(c, lim) : std::max(c, lim);
}

double limited_slope(RelaxedSchemeConfig::Limiter lim, double dl, double dr,
                     double tvb_threshold) {
  double central = 0.5 * (dl + dr);
  if (std::abs(central) <= tvb_threshold) return central;
  return lim == RelaxedSchemeConfig::Limiter::minmod ? minmod(dl, dr) : mc_limit(dl, dr);
}

ConservedMoments mirror(const ConservedMoments& U) { return {U.rho, -U.mom, U.energy}; }

}  // namespace

double euler_max_dt(std::span<const ConservedMoments> field, const Grid1D& grid,
                    double cfl) {
  if (!(cfl > 0.0)) throw ArgumentError("euler_max_dt: cfl must be positive");
  double s_max = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    s_max = std::max(s_max, wave_speed(field[i], static_cast<int>(i)));
  if (!(s_max > 0.0)) throw InvalidStateError("euler_max_dt: field has no signal speed");
  return cfl * grid.dx / s_max;
}

std::vector<ConservedMoments> fill_ghosts(std::span<const ConservedMoments> field,
                                          const Grid1D& grid, int ng) {
  const int n = static_cast<int>(field.size());
  if (n != grid.n_cells) throw ArgumentError("fill_ghosts: field size mismatch");
  if (ng > n) throw ArgumentError("fill_ghosts: ghost depth exceeds field size");
  std::vector<ConservedMoments> padded(n + 2 * ng);
  for (int i = 0; i < n; ++i) padded[ng + i] = field[i];
  for (int j = 1; j <= ng; ++j) {
    ConservedMoments& gl = padded[ng - j];
    switch (grid.left.kind) {
      case BoundaryKind::periodic:
        gl = field[n - j];
        break;
      case BoundaryKind::specular_wall:
        gl = mirror(field[j - 1]);
        break;
      case BoundaryKind::inflow:
        gl = *grid.left.reservoir;
        break;
      case BoundaryKind::free_flow:
        gl = field[0];
        break;
    }
    ConservedMoments& gr = padded[ng + n - 1 + j];
    switch (grid.right.kind) {
      case BoundaryKind::periodic:
        gr = field[j - 1];
        break;
      case BoundaryKind::specular_wall:
        gr = mirror(field[n - j]);
        break;
      case BoundaryKind::inflow:
        gr = *grid.right.reservoir;
        break;
      case BoundaryKind::free_flow:
        gr = field[n - 1];
        break;
    }
  }
  return padded;
}

// ---------------------------------------------------------------------------
// MUSCL relaxed scheme
// ---------------------------------------------------------------------------

MusclRelaxedSolver::MusclRelaxedSolver(RelaxedSchemeConfig config) : config_(config) {
  if (!(config_.cfl > 0.0 && config_.cfl < 1.0))
    throw ArgumentError("MusclRelaxedSolver: cfl must lie in (0, 1)");
  if (!(config_.speed_safety >= 1.0))
    throw ArgumentError("MusclRelaxedSolver: speed safety factor must be >= 1");
}

namespace {

// One conservative residual evaluation: interface fluxes from limited slopes
// of the characteristic variables p = F + aU (right-going) and q = F - aU
// (left-going), both frozen at speed a.
std::vector<ConservedMoments> relaxed_rhs(const std::vector<ConservedMoments>& field,
                                          const Grid1D& grid, double a,
                                          const RelaxedSchemeConfig& config) {
  const int n = grid.n_cells;
  const int ng = 2;
  std::vector<ConservedMoments> pad = fill_ghosts(field, grid, ng);
  const int m = n + 2 * ng;
  std::vector<ConservedMoments> pvar(m), qvar(m);
  for (int i = 0; i < m; ++i) {
    ConservedMoments f = flux_of(pad[i]);
    for (int k = 0; k < 3; ++k) {
      pvar[i][k] = f[k] + a * pad[i][k];
      qvar[i][k] = f[k] - a * pad[i][k];
    }
  }
  double wmax[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < 3; ++k)
      wmax[k] = std::max({wmax[k], std::abs(pvar[i][k]), std::abs(qvar[i][k])});
  }
  double tvb[3];
  for (int k = 0; k < 3; ++k) tvb[k] = config.tvb_m * grid.dx * grid.dx * wmax[k];
  auto slope = [&](const std::vector<ConservedMoments>& w, int i, int k) {
    return limited_slope(config.limiter, w[i][k] - w[i - 1][k], w[i + 1][k] - w[i][k],
                         tvb[k]);
  };
  // H[k] is the flux through interface k - 1/2 of interior cell k, k = 0..n.
  std::vector<ConservedMoments> H(n + 1);
  for (int k = 0; k <= n; ++k) {
    int Lc = ng + k - 1;
    int Rc = ng + k;
    for (int c = 0; c < 3; ++c) {
      double pl = pvar[Lc][c] + 0.5 * slope(pvar, Lc, c);
      double qr = qvar[Rc][c] - 0.5 * slope(qvar, Rc, c);
      H[k][c] = 0.5 * (pl + qr);
    }
  }
  std::vector<ConservedMoments> rhs(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) rhs[i][c] = -(H[i + 1][c] - H[i][c]) / grid.dx;
  }
  return rhs;
}

}  // namespace

std::vector<ConservedMoments> MusclRelaxedSolver::step(
    const std::vector<ConservedMoments>& field, double dt, const Grid1D& grid) const {
  const int n = grid.n_cells;
  if (static_cast<int>(field.size()) != n)
    throw ArgumentError("MusclRelaxedSolver: field size mismatch");

  // Frozen speed from the stage-0 field including ghost states, so inflow
  // reservoirs are covered.
  std::vector<ConservedMoments> pad = fill_ghosts(field, grid, 1);
  double s_max = 0.0;
  for (std::size_t i = 0; i < pad.size(); ++i)
    s_max = std::max(s_max, wave_speed(pad[i], static_cast<int>(i) - 1));
  if (!(s_max > 0.0)) return field;  // all-vacuum field is a fixed point
  const double a = config_.speed_safety * s_max;

  std::vector<ConservedMoments> rhs = relaxed_rhs(field, grid, a, config_);
  std::vector<ConservedMoments> stage(n);
  for (int i = 0; i < n; ++i) stage[i] = field[i] + rhs[i] * dt;
  validate_update(stage);

  std::vector<ConservedMoments> rhs2 = relaxed_rhs(stage, grid, a, config_);
  std::vector<ConservedMoments> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = (field[i] + stage[i] + rhs2[i] * dt) * 0.5;
  validate_update(out);
  return out;
}

double MusclRelaxedSolver::max_dt(const std::vector<ConservedMoments>& field,
                                  const Grid1D& grid) const {
  return euler_max_dt(field, grid, config_.cfl) / config_.speed_safety;
}

// ---------------------------------------------------------------------------
// Local Lax-Friedrichs fallback
// ---------------------------------------------------------------------------

LaxFriedrichsSolver::LaxFriedrichsSolver(RelaxedSchemeConfig config) : config_(config) {
  if (!(config_.cfl > 0.0 && config_.cfl < 1.0))
    throw ArgumentError("LaxFriedrichsSolver: cfl must lie in (0, 1)");
}

std::vector<ConservedMoments> LaxFriedrichsSolver::step(
    const std::vector<ConservedMoments>& field, double dt, const Grid1D& grid) const {
  const int n = grid.n_cells;
  if (static_cast<int>(field.size()) != n)
    throw ArgumentError("LaxFriedrichsSolver: field size mismatch");
  const int ng = 1;
  std::vector<ConservedMoments> pad = fill_ghosts(field, grid, ng);
  std::vector<ConservedMoments> H(n + 1);
  for (int k = 0; k <= n; ++k) {
    const ConservedMoments& UL = pad[ng + k - 1];
    const ConservedMoments& UR = pad[ng + k];
    double s = std::max(wave_speed(UL, k - 1), wave_speed(UR, k));
    ConservedMoments FL = flux_of(UL), FR = flux_of(UR);
    for (int c = 0; c < 3; ++c) H[k][c] = 0.5 * (FL[c] + FR[c]) - 0.5 * s * (UR[c] - UL[c]);
  }
  std::vector<ConservedMoments> out(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c)
      out[i][c] = field[i][c] - dt / grid.dx * (H[i + 1][c] - H[i][c]);
  }
  validate_update(out);
  return out;
}

double LaxFriedrichsSolver::max_dt(const std::vector<ConservedMoments>& field,
                                   const Grid1D& grid) const {
  return euler_max_dt(field, grid, config_.cfl);
}

std::unique_ptr<FluidSolver> make_fluid_solver(const std::string& id,
                                               RelaxedSchemeConfig config) {
  if (id == "muscl_relaxed") return std::make_unique<MusclRelaxedSolver>(config);
  if (id == "lax_friedrichs") return std::make_unique<LaxFriedrichsSolver>(config);
  throw ArgumentError("unknown fluid solver id: " + id);
}

std::vector<std::string> fluid_solver_ids() { return {"muscl_relaxed", "lax_friedrichs"}; }

}  // namespace bgk1d
