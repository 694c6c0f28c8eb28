#include "bgk1d/hybrid.hpp"

#include <algorithm>
#include <cmath>

namespace bgk1d {

double compute_lambda(double dt, double epsilon, double C) {
  if (!(dt >= 0.0)) throw ArgumentError("compute_lambda: dt must be nonnegative");
  if (!(epsilon > 0.0)) throw ArgumentError("compute_lambda: epsilon must be positive");
  return std::exp(-C * dt / epsilon);
}

double particle_dt_bound(const std::vector<ConservedMoments>& field, const Grid1D& grid,
                         const FsiConfig& config) {
  double nu = nu_max_estimate(field, config.nu_max_factor, config.include_bulk_speed);
  if (!(nu > 0.0)) throw InvalidStateError("particle_dt_bound: no admissible cell");
  return grid.dx / nu;
}

namespace {

std::optional<MaxwellianParams> try_params(const ConservedMoments& U) {
  if (!(U.rho > 0.0)) return std::nullopt;
  double u = U.mom / U.rho;
  double T = 2.0 * U.energy / U.rho - u * u;
  if (!(T > 0.0)) return std::nullopt;
  return MaxwellianParams{U.rho, u, T};
}

struct EquilibriumTerm {
  double beta = 0.0;
  std::optional<MaxwellianParams> params;
};

// Pre-step equilibrium description of cell `i`, extended one ghost cell per
// side with the grid's boundary rule (mirrored parameters at a wall, the
// reservoir at an inflow, the edge cell otherwise).
EquilibriumTerm equilibrium_term(int i, const std::vector<double>& beta,
                                 const std::vector<std::optional<MaxwellianParams>>& params,
                                 const Grid1D& grid) {
  const int n = grid.n_cells;
  if (i >= 0 && i < n) return {beta[i], params[i]};
  const bool left = i < 0;
  const BoundarySide& side = left ? grid.left : grid.right;
  const int edge = left ? 0 : n - 1;
  switch (side.kind) {
    case BoundaryKind::periodic:
      return {beta[(i + n) % n], params[(i + n) % n]};
    case BoundaryKind::specular_wall: {
      EquilibriumTerm t{beta[edge], params[edge]};
      if (t.params) t.params->u = -t.params->u;
      return t;
    }
    case BoundaryKind::inflow:
      return {beta[edge], try_params(*side.reservoir)};
    case BoundaryKind::free_flow:
    default:
      return {beta[edge], params[edge]};
  }
}

ScaledMaxwellian as_term(const EquilibriumTerm& t) {
  if (t.params && t.beta > 0.0) return {t.beta, *t.params};
  return {0.0, MaxwellianParams{1.0, 0.0, 1.0}};
}

}  // namespace

BetaEstimate estimate_beta_c_bound(const std::vector<double>& old_beta,
                                   const std::vector<std::optional<MaxwellianParams>>& old_params,
                                   const std::vector<ConservedMoments>& new_U,
                                   const Grid1D& grid, double dt) {
  const int n = grid.n_cells;
  if (!(dt > 0.0)) throw ArgumentError("estimate_beta_c_bound: dt must be positive");
  const double v_bound = grid.dx / dt;
  BetaEstimate est;
  est.provenance = "bound";
  est.beta_c.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    std::optional<MaxwellianParams> mh = try_params(new_U[i]);
    if (!mh) continue;  // nothing can be guaranteed against a vacuum Maxwellian
    ScaledMaxwellian right_terms[2] = {
        as_term(equilibrium_term(i, old_beta, old_params, grid)),
        as_term(equilibrium_term(i - 1, old_beta, old_params, grid))};
    ScaledMaxwellian left_terms[2] = {
        right_terms[0], as_term(equilibrium_term(i + 1, old_beta, old_params, grid))};
    RatioMinResult br = min_ratio_maxwellians(right_terms, *mh, 0.0, v_bound);
    RatioMinResult bl = min_ratio_maxwellians(left_terms, *mh, -v_bound, 0.0);
    est.beta_c[i] = std::clamp(std::min(br.min_value, bl.min_value), 0.0, 1.0);
  }
  return est;
}

double estimate_beta_c_reconstruction(std::span<const double> tagged_velocities,
                                      double mp, double dx, const MaxwellianParams& mh,
                                      int bins, double span) {
  if (bins < 1) throw ArgumentError("estimate_beta_c_reconstruction: bins must be >= 1");
  if (tagged_velocities.empty()) return 0.0;
  double sT = std::sqrt(mh.T);
  double lo = mh.u - span * sT;
  double width = 2.0 * span * sT;
  double bw = width / bins;
  std::vector<long long> counts(bins, 0);
  for (double v : tagged_velocities) {
    int b = static_cast<int>(std::floor((v - lo) / bw));
    if (b < 0 || b >= bins) continue;
    ++counts[b];
  }
  double best = 1.0;
  bool any = false;
  for (int b = 0; b < bins; ++b) {
    if (counts[b] == 0) continue;
    double density = static_cast<double>(counts[b]) * mp / (dx * bw);
    double center = lo + (b + 0.5) * bw;
    double ratio = density / eval_maxwellian(mh, center);
    if (!any || ratio < best) best = ratio;
    any = true;
  }
  if (!any) return 0.0;
  return std::clamp(best, 0.0, 1.0);
}

HybridState initialize_hybrid(const std::vector<ConservedMoments>& profile,
                              const Grid1D& grid, std::size_t n_total, double epsilon,
                              double dt0, std::uint64_t seed, bool matching) {
  HybridState st;
  st.grid = grid;
  st.buffer = init_particles(profile, grid, n_total, seed);
  st.U = profile;
  st.beta.assign(grid.n_cells, 0.0);
  const double mp = st.buffer.mp;
  const double lambda_bar = compute_lambda(dt0, epsilon);

  CellIndex index;
  index.build(st.buffer, grid);
  std::vector<std::uint8_t> keep(st.buffer.size(), 0);
  for (int i = 0; i < grid.n_cells; ++i) {
    auto ids = index.cell(i);
    RngStream rng(seed, {i, -1, stream_salt::relaxation});
    std::vector<std::uint32_t> survivors = relaxation_discard(ids, lambda_bar, rng);
    double cell_mass = std::max(0.0, profile[i].rho) * grid.dx;
    auto allowed = static_cast<long long>(std::floor(cell_mass / mp + 1e-12));
    if (static_cast<long long>(survivors.size()) > allowed) {
      // Survivors are in shuffle order, so a prefix is still a uniform subset.
      st.diag.capacity_discards += static_cast<long long>(survivors.size()) - allowed;
      survivors.resize(allowed);
    }
    for (auto id : survivors) keep[id] = 1;
    if (profile[i].rho > 0.0) {
      double pool_frac = static_cast<double>(survivors.size()) * mp / (profile[i].rho * grid.dx);
      st.beta[i] = std::clamp(1.0 - pool_frac, 0.0, 1.0);
      if (matching && survivors.size() >= 2) {
        std::vector<double> vel(survivors.size());
        for (std::size_t q = 0; q < survivors.size(); ++q) vel[q] = st.buffer.v[survivors[q]];
        double m1 = profile[i].mom / profile[i].rho;
        double m2 = 2.0 * profile[i].energy / profile[i].rho;
        try {
          moment_match(vel, m1, m2);
          for (std::size_t q = 0; q < survivors.size(); ++q) st.buffer.v[survivors[q]] = vel[q];
        } catch (const MatchingError&) {
          ++st.diag.matching_deficits;
        }
      } else if (matching && survivors.size() == 1) {
        ++st.diag.matching_deficits;
      }
    }
  }
  st.buffer.compact(keep);
  return st;
}

namespace {

// Slot of the post-relaxation pool: either a live buffer particle or a
// freshly drawn velocity waiting to be appended.
struct PoolSlot {
  enum class Kind { survivor, buffer_tagged, fresh } kind;
  std::uint32_t buffer_id = 0;  // survivor / buffer_tagged
  std::size_t fresh_idx = 0;    // index into the cell's fresh velocities
};

void hybrid_step_impl(HybridState& st, double dt, const KnudsenConfig& knudsen,
                      const FluidSolver& fluid, const FsiConfig& cfg,
                      std::uint64_t seed) {
  cfg.validate();
  const Grid1D& grid = st.grid;
  const int n = grid.n_cells;
  const double dx = grid.dx;
  const double mp = st.buffer.mp;
  const bool fsi1 = cfg.variant == FsiConfig::Variant::fsi1;
  const double lambda = compute_lambda(dt, knudsen.epsilon, knudsen.C);
  double lambda_bar = fsi1 ? 1.0 : lambda;
  if (cfg.lambda_bar == FsiConfig::LambdaBarPolicy::match_lambda) lambda_bar = lambda;
  if (cfg.lambda_bar == FsiConfig::LambdaBarPolicy::full) lambda_bar = 1.0;

  // Pre-step equilibrium description, kept for beta^c and the upwind
  // transported-Maxwellian density.
  std::vector<double> old_beta = st.beta;
  std::vector<std::optional<MaxwellianParams>> old_params(n);
  for (int i = 0; i < n; ++i) old_params[i] = try_params(st.U[i]);

  // (a) Sample the equilibrium fraction into tagged particles.
  st.buffer.clear_tags();
  for (int i = 0; i < n; ++i) {
    double target_mass = lambda_bar * st.beta[i] * std::max(0.0, st.U[i].rho) * dx;
    if (!(target_mass > 0.0)) continue;
    RngStream rng(seed, {i, st.step_index, stream_salt::equilibrium_sampling});
    long long nm = iround(target_mass / mp, rng);
    if (nm <= 0) continue;
    MaxwellianParams m = maxwellian_params(st.U[i], kVelocityDim, i);
    double sT = std::sqrt(m.T);
    for (long long q = 0; q < nm; ++q) {
      double px = grid.x_min + (i + rng.uniform01()) * dx;
      double pv = m.u + sT * rng.gaussian();
      st.buffer.append(px, pv, ParticleTag::equilibrium);
    }
  }

  // (b) Transport everything; boundary injection feeds the particle fraction.
  transport_particles(st.buffer, dt);
  {
    RngStream brng(seed, {-1, st.step_index, stream_salt::boundary});
    apply_boundaries(st.buffer, grid, dt, brng, 1.0 - st.beta.front(),
                     1.0 - st.beta.back());
  }

  CellIndex index;
  index.build(st.buffer, grid);
  std::vector<std::vector<std::uint32_t>> untagged(n), tagged(n);
  for (int i = 0; i < n; ++i) {
    auto ids = index.cell(i);
    for (auto j : ids) {
      if (st.buffer.tag[j] == ParticleTag::equilibrium)
        tagged[i].push_back(j);
      else
        untagged[i].push_back(j);
    }
  }

  // Moments of the advected nonequilibrium fraction.
  std::vector<ConservedMoments> Up(n);
  for (int i = 0; i < n; ++i) {
    KahanSum s1, s2;
    for (auto j : untagged[i]) {
      s1.add(st.buffer.v[j]);
      s2.add(st.buffer.v[j] * st.buffer.v[j]);
    }
    double w = mp / dx;
    Up[i] = {static_cast<double>(untagged[i].size()) * w, w * s1.value(),
             0.5 * w * s2.value()};
  }

  // Fluid advance on the equilibrium moments beta U.
  std::vector<ConservedMoments> fluid_field(n);
  for (int i = 0; i < n; ++i) fluid_field[i] = st.U[i] * st.beta[i];
  Grid1D fgrid = grid;
  if (fgrid.left.kind == BoundaryKind::inflow)
    fgrid.left.reservoir = *grid.left.reservoir * st.beta.front();
  if (fgrid.right.kind == BoundaryKind::inflow)
    fgrid.right.reservoir = *grid.right.reservoir * st.beta.back();
  std::vector<ConservedMoments> Ue = fluid.step(fluid_field, dt, fgrid);

  // Hybrid moments U^{n+1} = U^p + U^E.
  std::vector<ConservedMoments> Unew(n);
  for (int i = 0; i < n; ++i) Unew[i] = Up[i] + Ue[i];

  // FSI1: post-transport equilibrium fraction estimate.
  std::vector<double> beta_c(n, 0.0);
  if (fsi1) {
    if (cfg.beta_estimator == FsiConfig::BetaEstimator::bound) {
      beta_c = estimate_beta_c_bound(old_beta, old_params, Unew, grid, dt).beta_c;
    } else {
      for (int i = 0; i < n; ++i) {
        std::optional<MaxwellianParams> mh = try_params(Unew[i]);
        if (!mh || tagged[i].empty()) continue;
        std::vector<double> vel(tagged[i].size());
        for (std::size_t q = 0; q < vel.size(); ++q) vel[q] = st.buffer.v[tagged[i][q]];
        beta_c[i] = estimate_beta_c_reconstruction(vel, mp, dx, *mh,
                                                   cfg.reconstruction_bins,
                                                   cfg.reconstruction_span);
      }
    }
  }

  // (c) Relaxation: rebuild the per-cell pools.
  std::vector<std::uint8_t> keep(st.buffer.size(), 0);
  std::vector<double> new_x, new_v;
  std::vector<double> beta_new(n, 0.0);

  for (int i = 0; i < n; ++i) {
    RngStream rng(seed, {i, st.step_index, stream_salt::relaxation});
    std::vector<std::uint32_t> survivors = relaxation_discard(untagged[i], lambda, rng);

    std::vector<std::uint32_t> kept_tagged;
    std::vector<double> fresh;  // top-ups (fsi) or residual samples (fsi1)

    if (!fsi1) {
      if (cfg.matching) {
        double rho_e = std::max(0.0, Ue[i].rho);
        long long target = iround(lambda * rho_e * dx / mp, rng);
        auto& tg = tagged[i];
        if (static_cast<long long>(tg.size()) >= target) {
          kept_tagged.assign(tg.begin(), tg.end());
          for (long long q = 0; q < target; ++q) {
            std::size_t pick = q + rng.uniform_below(kept_tagged.size() - q);
            std::swap(kept_tagged[q], kept_tagged[pick]);
          }
          kept_tagged.resize(target);
        } else {
          kept_tagged.assign(tg.begin(), tg.end());
          long long deficit = target - static_cast<long long>(tg.size());
          if (deficit > 0) {
            MaxwellianParams me = maxwellian_params(Ue[i], kVelocityDim, i);
            fresh = sample_maxwellian(me, deficit, rng);
            st.diag.tagged_deficits += deficit;
          }
        }
      } else {
        kept_tagged.assign(tagged[i].begin(), tagged[i].end());
      }
    } else {
      double rho_e = std::max(0.0, Ue[i].rho);
      double resid_mass = lambda * std::max(0.0, rho_e - beta_c[i] * Unew[i].rho);
      long long nt = iround(resid_mass * dx / mp, rng);
      if (nt > 0) {
        std::optional<MaxwellianParams> mh = try_params(Unew[i]);
        // Upwind evaluation of the transported Maxwellian density.
        EquilibriumTerm own = equilibrium_term(i, old_beta, old_params, grid);
        EquilibriumTerm west = equilibrium_term(i - 1, old_beta, old_params, grid);
        EquilibriumTerm east = equilibrium_term(i + 1, old_beta, old_params, grid);
        auto mhat = [&](double v) {
          double c = std::min(1.0, std::abs(v) * dt / dx);
          const EquilibriumTerm& up = v >= 0.0 ? west : east;
          double val = 0.0;
          if (own.params && own.beta > 0.0)
            val += (1.0 - c) * own.beta * eval_maxwellian(*own.params, v);
          if (up.params && up.beta > 0.0)
            val += c * up.beta * eval_maxwellian(*up.params, v);
          return val;
        };
        std::vector<double> source;
        source.reserve(tagged[i].size());
        for (auto j : tagged[i]) {
          double v = st.buffer.v[j];
          if (mhat(v) > 0.0) source.push_back(v);
        }
        if (!source.empty() && mh) {
          AcceptRejectResult r =
              accept_reject_residual(source, mhat, nt, beta_c[i], *mh, rng);
          fresh = std::move(r.velocities);
          st.diag.clamp_count += r.clamp_count;
        } else {
          MaxwellianParams me = maxwellian_params(Ue[i], kVelocityDim, i);
          fresh = sample_maxwellian(me, nt, rng);
          st.diag.tagged_deficits += nt;
        }
      }
      // The transported Maxwellian cloud is consumed; all tagged are dropped.
    }

    // Assemble the pool and enforce the cell mass capacity.
    std::vector<PoolSlot> pool;
    pool.reserve(survivors.size() + kept_tagged.size() + fresh.size());
    for (auto id : survivors) pool.push_back({PoolSlot::Kind::survivor, id, 0});
    for (auto id : kept_tagged) pool.push_back({PoolSlot::Kind::buffer_tagged, id, 0});
    for (std::size_t q = 0; q < fresh.size(); ++q)
      pool.push_back({PoolSlot::Kind::fresh, 0, q});

    double cell_mass = std::max(0.0, Unew[i].rho) * dx;
    auto allowed = static_cast<long long>(std::floor(cell_mass / mp + 1e-12));
    if (static_cast<long long>(pool.size()) > allowed) {
      long long excess = static_cast<long long>(pool.size()) - allowed;
      st.diag.capacity_discards += excess;
      for (long long q = 0; q < allowed; ++q) {
        std::size_t pick = q + rng.uniform_below(pool.size() - q);
        std::swap(pool[q], pool[pick]);
      }
      pool.resize(allowed);
    }

    if (Unew[i].rho > 0.0) {
      double pool_frac = static_cast<double>(pool.size()) * mp / (Unew[i].rho * dx);
      beta_new[i] = std::clamp(1.0 - pool_frac, 0.0, 1.0);
    } else {
      beta_new[i] = 0.0;
    }

    // Moment matching: the equilibrium-origin subset absorbs the difference
    // between the pool targets and the raw survivors, so the per-cell
    // identity pool = (1 - beta) U^{n+1} holds exactly. Falls back to
    // matching the whole pool when the subset alone cannot.
    if (cfg.matching && Unew[i].rho > 0.0 && !pool.empty()) {
      double pool_frac = static_cast<double>(pool.size()) * mp / (Unew[i].rho * dx);
      double total1 = pool_frac * Unew[i].mom * dx / mp;
      double total2 = 2.0 * pool_frac * Unew[i].energy * dx / mp;

      auto slot_velocity = [&](const PoolSlot& s) {
        return s.kind == PoolSlot::Kind::fresh ? fresh[s.fresh_idx] : st.buffer.v[s.buffer_id];
      };
      KahanSum s1_surv, s2_surv;
      std::vector<const PoolSlot*> subset_slots;
      for (const auto& s : pool) {
        if (s.kind == PoolSlot::Kind::survivor) {
          double v = slot_velocity(s);
          s1_surv.add(v);
          s2_surv.add(v * v);
        } else {
          subset_slots.push_back(&s);
        }
      }
      bool matched = false;
      if (subset_slots.size() >= 2) {
        std::vector<double> vel(subset_slots.size());
        for (std::size_t q = 0; q < vel.size(); ++q) vel[q] = slot_velocity(*subset_slots[q]);
        double k = static_cast<double>(vel.size());
        double m1 = (total1 - s1_surv.value()) / k;
        double m2 = (total2 - s2_surv.value()) / k;
        try {
          moment_match(vel, m1, m2);
          for (std::size_t q = 0; q < vel.size(); ++q) {
            const PoolSlot& s = *subset_slots[q];
            if (s.kind == PoolSlot::Kind::fresh)
              fresh[s.fresh_idx] = vel[q];
            else
              st.buffer.v[s.buffer_id] = vel[q];
          }
          matched = true;
        } catch (const MatchingError&) {
        }
      }
      if (!matched && pool.size() >= 2) {
        std::vector<double> vel(pool.size());
        for (std::size_t q = 0; q < vel.size(); ++q) vel[q] = slot_velocity(pool[q]);
        double m1 = Unew[i].mom / Unew[i].rho;
        double m2 = 2.0 * Unew[i].energy / Unew[i].rho;
        try {
          moment_match(vel, m1, m2);
          for (std::size_t q = 0; q < vel.size(); ++q) {
            const PoolSlot& s = pool[q];
            if (s.kind == PoolSlot::Kind::fresh)
              fresh[s.fresh_idx] = vel[q];
            else
              st.buffer.v[s.buffer_id] = vel[q];
          }
          matched = true;
        } catch (const MatchingError&) {
        }
      }
      if (!matched) ++st.diag.matching_deficits;
    }

    // Commit the pool: mark kept buffer particles, queue fresh appends.
    for (const auto& s : pool) {
      if (s.kind == PoolSlot::Kind::fresh) {
        new_x.push_back(grid.x_min + (i + rng.uniform01()) * dx);
        new_v.push_back(fresh[s.fresh_idx]);
      } else {
        keep[s.buffer_id] = 1;
      }
    }
  }

  st.buffer.compact(keep);
  st.buffer.clear_tags();
  for (std::size_t q = 0; q < new_x.size(); ++q) st.buffer.append(new_x[q], new_v[q]);

  st.beta = std::move(beta_new);
  st.U = std::move(Unew);
  ++st.step_index;
  st.time += dt;
}

}  // namespace

void fsi_step(HybridState& state, double dt, const KnudsenConfig& knudsen,
              const FluidSolver& fluid, const FsiConfig& config, std::uint64_t seed) {
  FsiConfig cfg = config;
  cfg.variant = FsiConfig::Variant::fsi;
  hybrid_step_impl(state, dt, knudsen, fluid, cfg, seed);
}

void fsi1_step(HybridState& state, double dt, const KnudsenConfig& knudsen,
               const FluidSolver& fluid, const FsiConfig& config, std::uint64_t seed) {
  FsiConfig cfg = config;
  cfg.variant = FsiConfig::Variant::fsi1;
  hybrid_step_impl(state, dt, knudsen, fluid, cfg, seed);
}

}  // namespace bgk1d
