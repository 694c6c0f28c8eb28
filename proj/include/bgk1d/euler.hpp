#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bgk1d/core.hpp"

namespace bgk1d {

struct RelaxedSchemeConfig {
  enum class Limiter { minmod, mc };
  double cfl = 0.9;
  // MC keeps second order at smooth extrema where minmod clips to first.
  Limiter limiter = Limiter::mc;
  // The frozen characteristic speed is safety * max(|u| + c) of the stage-0
  // field; the reported max_dt divides by it so the scheme stays inside its
  // own stability bound.
  double speed_safety = 1.2;
  // TVB correction: slopes whose central difference is below
  // tvb_m * dx^2 * max|w| (per characteristic component) are left unlimited,
  // so smooth extrema are not clipped to first order. The relative scaling
  // keeps near-vacuum fields fully limited. 0 disables the correction.
  double tvb_m = 50.0;
};

// The seam for the hybrid steppers: any conservative scheme advancing the
// compressible Euler system (d = 1 closure, gamma_eff = 3) can be slotted in.
class FluidSolver {
 public:
  virtual ~FluidSolver() = default;
  virtual std::vector<ConservedMoments> step(const std::vector<ConservedMoments>& field,
                                             double dt, const Grid1D& grid) const = 0;
  virtual double max_dt(const std::vector<ConservedMoments>& field,
                        const Grid1D& grid) const = 0;
  virtual std::string id() const = 0;
};

// dt = cfl dx / max_i(|u_i| + sqrt(gamma_eff T_i)); vacuum cells are skipped.
double euler_max_dt(std::span<const ConservedMoments> field, const Grid1D& grid,
                    double cfl);

// Ghost-padded copy of the field: `ng` ghost states per side. periodic wraps,
// specular_wall mirrors rho and E and negates momentum, inflow holds the
// reservoir, free_flow copies the edge cell.
std::vector<ConservedMoments> fill_ghosts(std::span<const ConservedMoments> field,
                                          const Grid1D& grid, int ng);

// Second-order MUSCL scheme built on a relaxation flux with a frozen speed:
// limited slopes on the characteristic variables F +- a U, Heun two-stage
// time integration, exact conservation on periodic domains.
class MusclRelaxedSolver final : public FluidSolver {
 public:
  explicit MusclRelaxedSolver(RelaxedSchemeConfig config = {});
  std::vector<ConservedMoments> step(const std::vector<ConservedMoments>& field,
                                     double dt, const Grid1D& grid) const override;
  double max_dt(const std::vector<ConservedMoments>& field,
                const Grid1D& grid) const override;
  std::string id() const override { return "muscl_relaxed"; }

 private:
  RelaxedSchemeConfig config_;
};

// First-order local Lax-Friedrichs (Rusanov) fallback.
class LaxFriedrichsSolver final : public FluidSolver {
 public:
  explicit LaxFriedrichsSolver(RelaxedSchemeConfig config = {});
  std::vector<ConservedMoments> step(const std::vector<ConservedMoments>& field,
                                     double dt, const Grid1D& grid) const override;
  double max_dt(const std::vector<ConservedMoments>& field,
                const Grid1D& grid) const override;
  std::string id() const override { return "lax_friedrichs"; }

 private:
  RelaxedSchemeConfig config_;
};

std::unique_ptr<FluidSolver> make_fluid_solver(const std::string& id,
                                               RelaxedSchemeConfig config = {});
std::vector<std::string> fluid_solver_ids();

}  // namespace bgk1d
