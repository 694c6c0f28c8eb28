#include "bgk1d/particles.hpp"

#include <algorithm>
#include <cmath>

namespace bgk1d {

void ParticleBuffer::compact(const std::vector<std::uint8_t>& keep) {
  std::size_t w = 0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (!keep[j]) continue;
    x[w] = x[j];
    v[w] = v[j];
    tag[w] = tag[j];
    ++w;
  }
  x.resize(w);
  v.resize(w);
  tag.resize(w);
}

void CellIndex::build(const ParticleBuffer& buf, const Grid1D& grid) {
  const std::size_t n = buf.size();
  offsets.assign(grid.n_cells + 1, 0);
  std::vector<std::uint32_t> cell_of(n);
  for (std::size_t j = 0; j < n; ++j) {
    int c = grid.cell_of(buf.x[j]);
    cell_of[j] = static_cast<std::uint32_t>(c);
    ++offsets[c + 1];
  }
  for (int i = 0; i < grid.n_cells; ++i) offsets[i + 1] += offsets[i];
  order.resize(n);
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t j = 0; j < n; ++j) order[cursor[cell_of[j]]++] = static_cast<std::uint32_t>(j);
}

ParticleBuffer init_particles(const std::vector<ConservedMoments>& profile,
                              const Grid1D& grid, std::size_t n_total,
                              std::uint64_t seed, std::int64_t step) {
  if (static_cast<int>(profile.size()) != grid.n_cells)
    throw ArgumentError("init_particles: profile size must match the grid");
  if (n_total == 0) throw ArgumentError("init_particles: n_total must be positive");

  // Cumulative mass for the cell draw; Maxwellian parameters where occupied.
  std::vector<double> cum(grid.n_cells);
  std::vector<double> u(grid.n_cells, 0.0), sT(grid.n_cells, 0.0);
  double total = 0.0;
  for (int i = 0; i < grid.n_cells; ++i) {
    double mass = profile[i].rho * grid.dx;
    if (mass < 0.0) throw InvalidStateError("init_particles: negative density");
    if (mass > 0.0) {
      Primitives pr = primitives_from_conserved(profile[i], kVelocityDim, i);
      u[i] = pr.u;
      sT[i] = std::sqrt(pr.T);
    }
    total += mass;
    cum[i] = total;
  }
  if (!(total > 0.0)) throw InvalidStateError("init_particles: zero total mass");

  ParticleBuffer buf;
  buf.mp = total / static_cast<double>(n_total);
  buf.reserve(n_total);
  RngStream rng(seed, {0, step, stream_salt::init});
  for (std::size_t j = 0; j < n_total; ++j) {
    double r = rng.uniform01() * total;
    int i = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), r) - cum.begin());
    if (i >= grid.n_cells) i = grid.n_cells - 1;
    double px = grid.x_min + (i + rng.uniform01()) * grid.dx;
    double pv = u[i] + sT[i] * rng.gaussian();
    buf.append(px, pv);
  }
  return buf;
}

void transport_particles(ParticleBuffer& buf, double dt) {
  if (dt < 0.0) throw ArgumentError("transport_particles: dt must be nonnegative");
  const std::size_t n = buf.size();
  for (std::size_t j = 0; j < n; ++j) buf.x[j] += buf.v[j] * dt;
}

namespace {

// Ballistic injection from an equilibrium reservoir behind one boundary.
void inject_from_reservoir(ParticleBuffer& buf, const Grid1D& grid, double dt,
                           RngStream& rng, const ConservedMoments& reservoir,
                           bool right_side, double fraction) {
  if (fraction <= 0.0 || dt <= 0.0) return;
  MaxwellianParams m0 = maxwellian_params(reservoir);
  double sT = std::sqrt(m0.T);
  double layer = (std::abs(m0.u) + 8.0 * sT) * dt;
  double expected = fraction * m0.rho * layer / buf.mp;
  long long n_cand = iround(expected, rng);
  for (long long k = 0; k < n_cand; ++k) {
    double depth = rng.uniform01() * layer;
    double pv = m0.u + sT * rng.gaussian();
    if (right_side) {
      double px = grid.x_max + depth + pv * dt;
      if (px < grid.x_max && px > grid.x_min) buf.append(px, pv);
    } else {
      double px = grid.x_min - depth + pv * dt;
      if (px > grid.x_min && px < grid.x_max) buf.append(px, pv);
    }
  }
}

}  // namespace

void apply_boundaries(ParticleBuffer& buf, const Grid1D& grid, double dt,
                      RngStream& rng, double inflow_fraction_left,
                      double inflow_fraction_right) {
  const double L = grid.length();
  if (grid.periodic()) {
    for (std::size_t j = 0; j < buf.size(); ++j) {
      double y = std::fmod(buf.x[j] - grid.x_min, L);
      if (y < 0.0) y += L;
      buf.x[j] = grid.x_min + y;
    }
    return;
  }

  std::vector<std::uint8_t> keep(buf.size(), 1);
  bool any_removed = false;
  for (std::size_t j = 0; j < buf.size(); ++j) {
    double& px = buf.x[j];
    if (px < grid.x_min) {
      if (grid.left.kind == BoundaryKind::specular_wall) {
        px = 2.0 * grid.x_min - px;
        buf.v[j] = -buf.v[j];
      } else {
        keep[j] = 0;
        any_removed = true;
      }
    } else if (px > grid.x_max) {
      if (grid.right.kind == BoundaryKind::specular_wall) {
        px = 2.0 * grid.x_max - px;
        buf.v[j] = -buf.v[j];
      } else {
        keep[j] = 0;
        any_removed = true;
      }
    }
  }
  if (any_removed) buf.compact(keep);

  if ((grid.left.kind == BoundaryKind::inflow ||
       grid.left.kind == BoundaryKind::free_flow) &&
      grid.left.reservoir) {
    inject_from_reservoir(buf, grid, dt, rng, *grid.left.reservoir, false,
                          inflow_fraction_left);
  }
  if ((grid.right.kind == BoundaryKind::inflow ||
       grid.right.kind == BoundaryKind::free_flow) &&
      grid.right.reservoir) {
    inject_from_reservoir(buf, grid, dt, rng, *grid.right.reservoir, true,
                          inflow_fraction_right);
  }
}

std::vector<std::uint32_t> relaxation_discard(std::span<const std::uint32_t> cell_particles,
                                              double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !(lambda <= 1.0))
    throw ArgumentError("relaxation_discard: lambda must lie in [0, 1]");
  const std::size_t n = cell_particles.size();
  long long k = iround(lambda * static_cast<double>(n), rng);
  if (k >= static_cast<long long>(n))
    return {cell_particles.begin(), cell_particles.end()};
  std::vector<std::uint32_t> pool(cell_particles.begin(), cell_particles.end());
  // Partial Fisher-Yates: the first k entries are a uniform subset.
  for (long long j = 0; j < k; ++j) {
    std::size_t pick = j + rng.uniform_below(n - j);
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(k);
  return pool;
}

double nu_max_estimate(const std::vector<ConservedMoments>& moments, double factor,
                       bool include_bulk_speed) {
  double t_max = 0.0;
  double u_max = 0.0;
  for (const auto& U : moments) {
    if (!(U.rho > 0.0)) continue;
    double u = U.mom / U.rho;
    double T = 2.0 * U.energy / U.rho - u * u;
    if (T > t_max) t_max = T;
    if (std::abs(u) > u_max) u_max = std::abs(u);
  }
  double nu = factor * std::sqrt(2.0 * t_max);
  if (include_bulk_speed) nu += u_max;
  return nu;
}

McmSolver::McmSolver(const std::vector<ConservedMoments>& profile, const Grid1D& grid,
                     std::size_t n_total, const KnudsenConfig& knudsen,
                     McmConfig config, std::uint64_t seed)
    : grid_(grid), knudsen_(knudsen), config_(config), seed_(seed) {
  buf_ = init_particles(profile, grid, n_total, seed);
  refresh_moments();
}

void McmSolver::refresh_moments() {
  index_.build(buf_, grid_);
  moments_.assign(grid_.n_cells, {});
  for (int i = 0; i < grid_.n_cells; ++i) {
    auto ids = index_.cell(i);
    KahanSum sv, sv2;
    for (auto j : ids) {
      sv.add(buf_.v[j]);
      sv2.add(buf_.v[j] * buf_.v[j]);
    }
    double w = buf_.mp / grid_.dx;
    moments_[i] = {static_cast<double>(ids.size()) * w, w * sv.value(),
                   0.5 * w * sv2.value()};
  }
}

double McmSolver::max_dt() const {
  double nu = nu_max_estimate(moments_, config_.nu_max_factor, config_.include_bulk_speed);
  if (!(nu > 0.0)) throw InvalidStateError("McmSolver: no positive-temperature cell");
  return grid_.dx / nu;
}

void McmSolver::step(double dt) {
  transport_particles(buf_, dt);
  RngStream brng(seed_, {-1, step_, stream_salt::boundary});
  apply_boundaries(buf_, grid_, dt, brng);

  index_.build(buf_, grid_);
  const double lambda = std::exp(-knudsen_.C * dt / knudsen_.epsilon);
  const double p_resample = 1.0 - lambda;

  std::vector<std::uint32_t> marked;
  for (int i = 0; i < grid_.n_cells; ++i) {
    auto ids = index_.cell(i);
    if (ids.empty()) continue;
    RngStream rng(seed_, {i, step_, stream_salt::relaxation});

    marked.clear();
    KahanSum s1_all, s2_all, s1_keep, s2_keep;
    for (auto j : ids) {
      double vj = buf_.v[j];
      s1_all.add(vj);
      s2_all.add(vj * vj);
      if (p_resample > 0.0 && rng.uniform01() < p_resample) {
        marked.push_back(j);
      } else {
        s1_keep.add(vj);
        s2_keep.add(vj * vj);
      }
    }
    if (marked.empty()) continue;
    if (marked.size() < 2 && config_.matching) {
      // A single resampled velocity cannot match two moments; skip the cell
      // this step to keep the conservation contract.
      ++matching_deficits_;
      continue;
    }

    double w = buf_.mp / grid_.dx;
    ConservedMoments ui{static_cast<double>(ids.size()) * w, w * s1_all.value(),
                        0.5 * w * s2_all.value()};
    MaxwellianParams m = maxwellian_params(ui, kVelocityDim, i);
    std::vector<double> fresh = sample_maxwellian(m, marked.size(), rng);

    if (config_.matching) {
      double k = static_cast<double>(marked.size());
      double m1 = (s1_all.value() - s1_keep.value()) / k;
      double m2 = (s2_all.value() - s2_keep.value()) / k;
      try {
        moment_match(fresh, m1, m2);
      } catch (const MatchingError&) {
        ++matching_deficits_;
        continue;  // keep the old velocities; conservation before law
      }
    }
    for (std::size_t q = 0; q < marked.size(); ++q) buf_.v[marked[q]] = fresh[q];
  }

  ++step_;
  refresh_moments();
}

}  // namespace bgk1d
