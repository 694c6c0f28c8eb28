#pragma once

#include <vector>

#include "bgk1d/core.hpp"

namespace bgk1d {

// Uniform symmetric velocity grid with trapezoid quadrature weights
// (dv at interior nodes, dv/2 at the ends; the weights sum to 2 v_max).
struct VelocityGrid {
  int n_v = 0;
  double v_max = 0.0;
  double dv = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  static VelocityGrid make(int n_v, double v_max);

  // Node index of -nodes[k]; the grid is symmetric about zero.
  int mirror(int k) const { return n_v - 1 - k; }
};

// v_max = max over the field of |u| + span sqrt(T).
VelocityGrid velocity_grid_for(const std::vector<ConservedMoments>& field, int n_v = 64,
                               double span = 6.0);

// f(x_i, v_k) >= 0, row-major in the cell index.
struct KineticField {
  int n_cells = 0;
  int n_v = 0;
  std::vector<double> f;

  KineticField() = default;
  KineticField(int cells, int nv) : n_cells(cells), n_v(nv), f(static_cast<std::size_t>(cells) * nv, 0.0) {}
  double& at(int i, int k) { return f[static_cast<std::size_t>(i) * n_v + k]; }
  double at(int i, int k) const { return f[static_cast<std::size_t>(i) * n_v + k]; }
};

// Trapezoid quadrature of (1, v, v^2/2) against f, per cell.
std::vector<ConservedMoments> dvm_moments(const KineticField& f, const VelocityGrid& vg);

// Maxwellian parameters corrected (Newton on rho, u, T) so the discrete
// quadrature of the evaluated Maxwellian reproduces `target` exactly; plain
// node evaluation would conserve only up to the quadrature error.
MaxwellianParams discrete_maxwellian_params(const ConservedMoments& target,
                                            const VelocityGrid& vg, int cell = -1);

// Deterministic discrete-velocity reference solver: second-order limited
// upwind transport per node, then pointwise relaxation
// f <- lambda f + (1 - lambda) M_f with lambda = exp(-dt/eps) and M_f built
// from the post-transport discrete moments.
class DvmSolver {
 public:
  DvmSolver(const std::vector<ConservedMoments>& profile, const Grid1D& grid,
            const VelocityGrid& vgrid, const KnudsenConfig& knudsen);

  void step(double dt);  // throws on CFL violation (dt > dx / v_max)
  double max_dt(double cfl = 0.9) const { return cfl * grid_.dx / vgrid_.v_max; }

  std::vector<ConservedMoments> moments() const { return dvm_moments(f_, vgrid_); }
  const KineticField& field() const { return f_; }
  const VelocityGrid& vgrid() const { return vgrid_; }
  const Grid1D& grid() const { return grid_; }

 private:
  void transport(double dt);
  void relax(double dt);

  Grid1D grid_;
  VelocityGrid vgrid_;
  KnudsenConfig knudsen_;
  KineticField f_;
  // Discrete-corrected reservoir parameters for inflow ghosts, per side.
  std::optional<MaxwellianParams> left_reservoir_;
  std::optional<MaxwellianParams> right_reservoir_;
};

}  // namespace bgk1d
