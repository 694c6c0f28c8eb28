#include "bgk1d/dvm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bgk1d {

VelocityGrid VelocityGrid::make(int n_v, double v_max) {
  if (n_v < 2) throw ArgumentError("VelocityGrid: need at least two nodes");
  if (!(v_max > 0.0)) throw ArgumentError("VelocityGrid: v_max must be positive");
  VelocityGrid vg;
  vg.n_v = n_v;
  vg.v_max = v_max;
  vg.dv = 2.0 * v_max / (n_v - 1);
  vg.nodes.resize(n_v);
  vg.weights.assign(n_v, vg.dv);
  for (int k = 0; k < n_v; ++k) vg.nodes[k] = -v_max + k * vg.dv;
  vg.weights.front() = 0.5 * vg.dv;
  vg.weights.back() = 0.5 * vg.dv;
  return vg;
}

VelocityGrid velocity_grid_for(const std::vector<ConservedMoments>& field, int n_v,
                               double span) {
  double v_max = 0.0;
  for (const auto& U : field) {
    if (!(U.rho > 0.0)) continue;
    double u = U.mom / U.rho;
    double T = 2.0 * U.energy / U.rho - u * u;
    if (T > 0.0) v_max = std::max(v_max, std::abs(u) + span * std::sqrt(T));
  }
  if (!(v_max > 0.0)) throw InvalidStateError("velocity_grid_for: no admissible cell");
  return VelocityGrid::make(n_v, v_max);
}

std::vector<ConservedMoments> dvm_moments(const KineticField& f, const VelocityGrid& vg) {
  std::vector<ConservedMoments> out(f.n_cells);
  for (int i = 0; i < f.n_cells; ++i) {
    KahanSum s0, s1, s2;
    for (int k = 0; k < f.n_v; ++k) {
      double w = vg.weights[k] * f.at(i, k);
      s0.add(w);
      s1.add(w * vg.nodes[k]);
      s2.add(0.5 * w * vg.nodes[k] * vg.nodes[k]);
    }
    out[i] = {s0.value(), s1.value(), s2.value()};
  }
  return out;
}

namespace {

// Quadrature moments (and parameter Jacobian) of the node-evaluated
// Maxwellian with parameters th.
void discrete_moments_and_jacobian(const MaxwellianParams& th, const VelocityGrid& vg,
                                   double g[3], double J[3][3]) {
  for (int m = 0; m < 3; ++m) {
    g[m] = 0.0;
    for (int l = 0; l < 3; ++l) J[m][l] = 0.0;
  }
  for (int k = 0; k < vg.n_v; ++k) {
    double v = vg.nodes[k];
    double M = eval_maxwellian(th, v);
    double w = vg.weights[k];
    double phi[3] = {1.0, v, 0.5 * v * v};
    double d = v - th.u;
    double dM_drho = M / th.rho;
    double dM_du = M * d / th.T;
    double dM_dT = M * (-0.5 / th.T + 0.5 * d * d / (th.T * th.T));
    for (int m = 0; m < 3; ++m) {
      g[m] += w * phi[m] * M;
      J[m][0] += w * phi[m] * dM_drho;
      J[m][1] += w * phi[m] * dM_du;
      J[m][2] += w * phi[m] * dM_dT;
    }
  }
}

void solve3(const double A[3][3], const double b[3], double x[3]) {
  double m[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[r][c] = A[r][c];
    m[r][3] = b[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) throw SolverFailure("discrete Maxwellian: singular Jacobian");
    if (piv != col)
      for (int c = 0; c < 4; ++c) std::swap(m[piv][c], m[col][c]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double fac = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= fac * m[col][c];
    }
  }
  for (int r = 0; r < 3; ++r) x[r] = m[r][3] / m[r][r];
}

}  // namespace

MaxwellianParams discrete_maxwellian_params(const ConservedMoments& target,
                                            const VelocityGrid& vg, int cell) {
  Primitives pr = primitives_from_conserved(target, kVelocityDim, cell);
  MaxwellianParams th{pr.rho, pr.u, pr.T};
  double vs = std::abs(pr.u) + std::sqrt(pr.T);
  double scale[3] = {pr.rho, pr.rho * vs, std::max(target.energy, pr.rho * vs * vs)};
  const double tol = 1e-14;

  double g[3], J[3][3];
  for (int iter = 0; iter < 12; ++iter) {
    discrete_moments_and_jacobian(th, vg, g, J);
    double r[3] = {g[0] - target.rho, g[1] - target.mom, g[2] - target.energy};
    bool done = true;
    for (int m = 0; m < 3; ++m) done = done && std::abs(r[m]) <= tol * scale[m];
    if (done) return th;
    double delta[3];
    solve3(J, r, delta);
    // Damp when a full step would leave the admissible set.
    double step = 1.0;
    while (step > 1e-4 && (th.rho - step * delta[0] <= 0.0 || th.T - step * delta[2] <= 0.0))
      step *= 0.5;
    th.rho -= step * delta[0];
    th.u -= step * delta[1];
    th.T -= step * delta[2];
  }
  // Check the final residual before giving up.
  discrete_moments_and_jacobian(th, vg, g, J);
  double r[3] = {g[0] - target.rho, g[1] - target.mom, g[2] - target.energy};
  for (int m = 0; m < 3; ++m) {
    if (std::abs(r[m]) > 1e-10 * scale[m]) {
      std::ostringstream os;
      os << "discrete Maxwellian correction did not converge";
      if (cell >= 0) os << " in cell " << cell;
      throw SolverFailure(os.str());
    }
  }
  return th;
}

DvmSolver::DvmSolver(const std::vector<ConservedMoments>& profile, const Grid1D& grid,
                     const VelocityGrid& vgrid, const KnudsenConfig& knudsen)
    : grid_(grid), vgrid_(vgrid), knudsen_(knudsen), f_(grid.n_cells, vgrid.n_v) {
  if (static_cast<int>(profile.size()) != grid.n_cells)
    throw ArgumentError("DvmSolver: profile size mismatch");
  for (int i = 0; i < grid_.n_cells; ++i) {
    if (!(profile[i].rho > 0.0)) continue;  // vacuum cell stays identically zero
    MaxwellianParams th = discrete_maxwellian_params(profile[i], vgrid_, i);
    for (int k = 0; k < vgrid_.n_v; ++k) f_.at(i, k) = eval_maxwellian(th, vgrid_.nodes[k]);
  }
  if (grid_.left.kind == BoundaryKind::inflow)
    left_reservoir_ = discrete_maxwellian_params(*grid_.left.reservoir, vgrid_);
  if (grid_.right.kind == BoundaryKind::inflow)
    right_reservoir_ = discrete_maxwellian_params(*grid_.right.reservoir, vgrid_);
}

void DvmSolver::step(double dt) {
  if (dt * vgrid_.v_max > grid_.dx * (1.0 + 1e-12))
    throw ArgumentError("DvmSolver: dt violates the transport CFL bound");
  transport(dt);
  relax(dt);
}

void DvmSolver::transport(double dt) {
  const int n = grid_.n_cells;
  const int ng = 2;
  std::vector<double> pad(n + 2 * ng);
  std::vector<double> fluxes(n + 1);
  KineticField fnew(n, vgrid_.n_v);

  for (int k = 0; k < vgrid_.n_v; ++k) {
    const double v = vgrid_.nodes[k];
    // Ghost fill for this velocity node.
    for (int i = 0; i < n; ++i) pad[ng + i] = f_.at(i, k);
    const int km = vgrid_.mirror(k);
    for (int j = 1; j <= ng; ++j) {
      double gl;
      switch (grid_.left.kind) {
        case BoundaryKind::periodic:
          gl = f_.at(n - j, k);
          break;
        case BoundaryKind::specular_wall:
          gl = f_.at(j - 1, km);
          break;
        case BoundaryKind::inflow:
          gl = eval_maxwellian(*left_reservoir_, v);
          break;
        case BoundaryKind::free_flow:
        default:
          gl = f_.at(0, k);
          break;
      }
      pad[ng - j] = gl;
      double gr;
      switch (grid_.right.kind) {
        case BoundaryKind::periodic:
          gr = f_.at(j - 1, k);
          break;
        case BoundaryKind::specular_wall:
          gr = f_.at(n - j, km);
          break;
        case BoundaryKind::inflow:
          gr = eval_maxwellian(*right_reservoir_, v);
          break;
        case BoundaryKind::free_flow:
        default:
          gr = f_.at(n - 1, k);
          break;
      }
      pad[ng + n - 1 + j] = gr;
    }

    const double nu = v * dt / grid_.dx;
    auto slope = [&](int i) {
      double dl = pad[i] - pad[i - 1];
      double dr = pad[i + 1] - pad[i];
      if (dl * dr <= 0.0) return 0.0;
      return dl > 0.0 ? std::min(dl, dr) : std::max(dl, dr);
    };
    // Interface flux q - 1/2 for interior cell q, q = 0..n (time-centered
    // TVD upwind, second order where the data is smooth).
    for (int q = 0; q <= n; ++q) {
      if (v >= 0.0) {
        int up = ng + q - 1;
        fluxes[q] = v * (pad[up] + 0.5 * (1.0 - nu) * slope(up));
      } else {
        int up = ng + q;
        fluxes[q] = v * (pad[up] - 0.5 * (1.0 + nu) * slope(up));
      }
    }
    for (int i = 0; i < n; ++i)
      fnew.at(i, k) = pad[ng + i] - dt / grid_.dx * (fluxes[i + 1] - fluxes[i]);
  }
  f_ = std::move(fnew);
}

void DvmSolver::relax(double dt) {
  const double lambda = std::exp(-knudsen_.C * dt / knudsen_.epsilon);
  if (lambda >= 1.0) return;
  std::vector<ConservedMoments> mom = dvm_moments(f_, vgrid_);
  for (int i = 0; i < grid_.n_cells; ++i) {
    if (!(mom[i].rho > 0.0)) continue;
    MaxwellianParams th = discrete_maxwellian_params(mom[i], vgrid_, i);
    for (int k = 0; k < vgrid_.n_v; ++k) {
      double m = eval_maxwellian(th, vgrid_.nodes[k]);
      f_.at(i, k) = lambda * f_.at(i, k) + (1.0 - lambda) * m;
    }
  }
}

}  // namespace bgk1d
