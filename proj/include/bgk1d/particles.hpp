#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bgk1d/core.hpp"
#include "bgk1d/sampling.hpp"

namespace bgk1d {

enum class ParticleTag : std::uint8_t {
  ordinary = 0,
  // Sampled from the local Maxwellian this step; cleared at step start.
  equilibrium = 1,
};

// Structure-of-arrays particle state with uniform particle mass mp.
struct ParticleBuffer {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<ParticleTag> tag;
  double mp = 0.0;

  std::size_t size() const { return x.size(); }

  void append(double px, double pv, ParticleTag t = ParticleTag::ordinary) {
    x.push_back(px);
    v.push_back(pv);
    tag.push_back(t);
  }

  void clear_tags() {
    std::fill(tag.begin(), tag.end(), ParticleTag::ordinary);
  }

  // In-place compaction keeping particles with keep[j] != 0.
  void compact(const std::vector<std::uint8_t>& keep);

  void reserve(std::size_t n) {
    x.reserve(n);
    v.reserve(n);
    tag.reserve(n);
  }
};

// Per-cell particle lists via counting sort; stable within a cell.
struct CellIndex {
  std::vector<std::uint32_t> order;    // particle indices grouped by cell
  std::vector<std::uint32_t> offsets;  // size n_cells + 1

  void build(const ParticleBuffer& buf, const Grid1D& grid);

  std::span<const std::uint32_t> cell(int i) const {
    return {order.data() + offsets[i], order.data() + offsets[i + 1]};
  }
  std::size_t count(int i) const { return offsets[i + 1] - offsets[i]; }
};

// Samples n_total particles i.i.d. from the piecewise-constant initial state
// (cell probabilities proportional to rho_i dx, uniform position within the
// cell, Maxwellian velocity of the cell). Sets mp = total mass / n_total.
ParticleBuffer init_particles(const std::vector<ConservedMoments>& profile,
                              const Grid1D& grid, std::size_t n_total,
                              std::uint64_t seed, std::int64_t step = 0);

// Free transport x += v dt. Tags and velocities untouched.
void transport_particles(ParticleBuffer& buf, double dt);

// Applies the grid's boundary conditions after a transport of length dt.
// periodic: wrap. specular_wall: reflect position about the wall and negate
// the velocity. inflow/free_flow with a reservoir: escaped particles are
// removed and replacements stream in ballistically from an equilibrium
// reservoir layer of depth (|u0| + 8 sqrt(T0)) dt, so the injected count has
// expectation (inflow_fraction * dt * inward reservoir flux) / mp and the
// entry positions carry the correct swept distribution. free_flow without a
// reservoir only removes escapees.
void apply_boundaries(ParticleBuffer& buf, const Grid1D& grid, double dt,
                      RngStream& rng, double inflow_fraction_left = 1.0,
                      double inflow_fraction_right = 1.0);

// Keeps iround(lambda * n) particles chosen uniformly without replacement;
// returns the surviving subset of `cell_particles`.
std::vector<std::uint32_t> relaxation_discard(std::span<const std::uint32_t> cell_particles,
                                              double lambda, RngStream& rng);

// ---------------------------------------------------------------------------
// Pure Monte Carlo reference solver
// ---------------------------------------------------------------------------

struct McmConfig {
  bool matching = true;
  // nu_max = factor * sqrt(2 T_max), optionally plus max |u|.
  double nu_max_factor = 4.0;
  bool include_bulk_speed = false;
};

class McmSolver {
 public:
  McmSolver(const std::vector<ConservedMoments>& profile, const Grid1D& grid,
            std::size_t n_total, const KnudsenConfig& knudsen, McmConfig config,
            std::uint64_t seed);

  // Transport + boundaries, then per cell each velocity is replaced by a
  // fresh Maxwellian draw with probability 1 - lambda; with matching enabled
  // the resampled subset is moment-matched so the cell moments are conserved.
  void step(double dt);

  double max_dt() const;  // dx / nu_max from the current cell moments

  const std::vector<ConservedMoments>& cell_moments() const { return moments_; }
  const ParticleBuffer& buffer() const { return buf_; }
  ParticleBuffer& mutable_buffer() { return buf_; }
  const Grid1D& grid() const { return grid_; }
  long long step_index() const { return step_; }
  long long matching_deficits() const { return matching_deficits_; }

 private:
  void refresh_moments();

  Grid1D grid_;
  KnudsenConfig knudsen_;
  McmConfig config_;
  std::uint64_t seed_;
  ParticleBuffer buf_;
  CellIndex index_;
  std::vector<ConservedMoments> moments_;
  long long step_ = 0;
  long long matching_deficits_ = 0;
};

// Largest admissible sample velocity used for the particle CFL bound.
double nu_max_estimate(const std::vector<ConservedMoments>& moments, double factor,
                       bool include_bulk_speed);

}  // namespace bgk1d
