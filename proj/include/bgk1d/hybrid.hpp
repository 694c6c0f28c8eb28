#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bgk1d/core.hpp"
#include "bgk1d/euler.hpp"
#include "bgk1d/particles.hpp"

namespace bgk1d {

struct FsiConfig {
  enum class Variant { fsi, fsi1 };
  enum class BetaEstimator { bound, reconstruction };
  // Fraction of the Maxwellian part turned into samples before transport.
  // per_variant: lambda for fsi (only that fraction survives the next
  // relaxation), the full part for fsi1 (the residual sampler needs the
  // whole transported cloud).
  enum class LambdaBarPolicy { per_variant, match_lambda, full };

  Variant variant = Variant::fsi;
  bool matching = true;
  std::string fluid_solver = "muscl_relaxed";
  BetaEstimator beta_estimator = BetaEstimator::bound;
  LambdaBarPolicy lambda_bar = LambdaBarPolicy::per_variant;

  // Particle CFL: nu_max = nu_max_factor * sqrt(2 T_max) (+ max |u| when
  // include_bulk_speed is set).
  double nu_max_factor = 4.0;
  bool include_bulk_speed = false;

  // Histogram settings for the reconstruction estimator (debug oracle):
  // bins span +- reconstruction_span * sqrt(T) around the local mean.
  int reconstruction_bins = 32;
  double reconstruction_span = 4.0;

  void validate() const {
    if (beta_estimator == BetaEstimator::reconstruction && variant != Variant::fsi1)
      throw ArgumentError("FsiConfig: the reconstruction estimator is fsi1-only");
  }
};

struct HybridDiagnostics {
  long long clamp_count = 0;        // acceptance-rejection probability clamps
  long long matching_deficits = 0;  // cells where moment matching was impossible
  long long tagged_deficits = 0;    // equilibrium particles topped up from M^E
  long long capacity_discards = 0;  // pool particles dropped to fit the cell mass
};

// The discrete realization of f = (1 - beta) f^p + beta M_f: a particle pool
// for the nonequilibrium fraction, a per-cell equilibrium weight beta, and
// the hybrid moment field U.
struct HybridState {
  Grid1D grid;
  ParticleBuffer buffer;
  std::vector<double> beta;
  std::vector<ConservedMoments> U;
  HybridDiagnostics diag;
  long long step_index = 0;
  double time = 0.0;
};

struct BetaEstimate {
  std::vector<double> beta_c;
  std::string provenance;  // "bound" or "reconstruction"
};

// Survival factor of the exact relaxation integrator, lambda = exp(-C dt/eps).
double compute_lambda(double dt, double epsilon, double C = 1.0);

// Samples particles from the initial state and immediately thins each cell to
// the (1 - beta) fraction with beta = 1 - lambda_bar, assigning the remaining
// mass to the fluid side. beta is then recomputed from the realized particle
// counts so that per-cell particle mass + beta-weighted fluid mass equals the
// cell mass exactly. With matching enabled the per-cell pools are
// moment-matched to the cell's bulk velocity and specific energy.
HybridState initialize_hybrid(const std::vector<ConservedMoments>& profile,
                              const Grid1D& grid, std::size_t n_total, double epsilon,
                              double dt0, std::uint64_t seed, bool matching = true);

// One step of the plain hybrid scheme: sample the lambda_bar fraction of each
// cell's Maxwellian part into tagged particles, transport everything, advance
// the fluid solver on beta U, merge moments, then discard untagged particles
// to the lambda fraction and retain the matched tagged set.
void fsi_step(HybridState& state, double dt, const KnudsenConfig& knudsen,
              const FluidSolver& fluid, const FsiConfig& config, std::uint64_t seed);

// One step of the optimized scheme: sample the full Maxwellian part, proceed
// as fsi_step through the moment merge, estimate the post-transport
// equilibrium fraction beta^c, and rebuild the pool from survivors plus
// residual particles drawn by acceptance-rejection from the transported
// Maxwellian cloud. Realizes beta(t + dt) = 1 - lambda (1 - beta^c).
void fsi1_step(HybridState& state, double dt, const KnudsenConfig& knudsen,
               const FluidSolver& fluid, const FsiConfig& config, std::uint64_t seed);

// Guaranteed underestimate of the optimal equilibrium fraction: per cell the
// minimum over the upwind neighbor pair of the exact minimum of
// beta_j M_j(v) / M^H_i(v) over the sign-matched velocity interval
// [0, dx/dt] or [-dx/dt, 0], clamped to [0, 1].
BetaEstimate estimate_beta_c_bound(const std::vector<double>& old_beta,
                                   const std::vector<std::optional<MaxwellianParams>>& old_params,
                                   const std::vector<ConservedMoments>& new_U,
                                   const Grid1D& grid, double dt);

// Histogram reconstruction of the transported Maxwellian from the tagged
// samples in one cell; noisy, used as a debug oracle. Returns beta^c in
// [0, 1] (0 when the cell has no tagged samples).
double estimate_beta_c_reconstruction(std::span<const double> tagged_velocities,
                                      double mp, double dx, const MaxwellianParams& mh,
                                      int bins, double span);

// dt bound from the particle CFL: dx / nu_max over the field.
double particle_dt_bound(const std::vector<ConservedMoments>& field, const Grid1D& grid,
                         const FsiConfig& config);

}  // namespace bgk1d
