#include <doctest.h>

#include <cmath>

#include "bgk1d/dvm.hpp"
#include "bgk1d/harness.hpp"

using namespace bgk1d;

TEST_CASE("velocity grid structure") {
  VelocityGrid vg = VelocityGrid::make(64, 10.0);
  CHECK(vg.nodes.front() == doctest::Approx(-10.0));
  CHECK(vg.nodes.back() == doctest::Approx(10.0));
  double wsum = 0.0;
  for (double w : vg.weights) wsum += w;
  CHECK(wsum == doctest::Approx(20.0).epsilon(1e-13));
  for (int k = 0; k < vg.n_v; ++k)
    CHECK(vg.nodes[vg.mirror(k)] == doctest::Approx(-vg.nodes[k]).epsilon(1e-13));
}

TEST_CASE("dvm moments of a sampled maxwellian") {
  VelocityGrid vg = VelocityGrid::make(64, 10.0);
  KineticField f(1, vg.n_v);
  MaxwellianParams m{1.0, 0.0, 1.0};
  for (int k = 0; k < vg.n_v; ++k) f.at(0, k) = eval_maxwellian(m, vg.nodes[k]);
  auto mom = dvm_moments(f, vg);
  CHECK(mom[0].rho == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mom[0].mom == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(mom[0].energy == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("dvm moments: zero field and linearity") {
  VelocityGrid vg = VelocityGrid::make(32, 8.0);
  KineticField f(2, vg.n_v);
  auto zero = dvm_moments(f, vg);
  CHECK(zero[0].rho == 0.0);
  CHECK(zero[1].energy == 0.0);
  for (int k = 0; k < vg.n_v; ++k) f.at(0, k) = eval_maxwellian({1.5, 0.3, 2.0}, vg.nodes[k]);
  auto m1 = dvm_moments(f, vg);
  for (int k = 0; k < vg.n_v; ++k) f.at(0, k) *= 2.0;
  auto m2 = dvm_moments(f, vg);
  CHECK(m2[0].rho == doctest::Approx(2.0 * m1[0].rho).epsilon(1e-14));
  CHECK(m2[0].mom == doctest::Approx(2.0 * m1[0].mom).epsilon(1e-12));
  CHECK(m2[0].energy == doctest::Approx(2.0 * m1[0].energy).epsilon(1e-14));
}

TEST_CASE("discrete maxwellian correction hits the target moments") {
  VelocityGrid vg = VelocityGrid::make(48, 9.0);
  RngStream rng(31, {0, 0, 0});
  for (int t = 0; t < 50; ++t) {
    double rho = 0.3 + 2.0 * rng.uniform01();
    double u = -1.5 + 3.0 * rng.uniform01();
    double T = 0.4 + 2.5 * rng.uniform01();
    ConservedMoments target = conserved_from_primitives(rho, u, T);
    MaxwellianParams th = discrete_maxwellian_params(target, vg);
    KineticField f(1, vg.n_v);
    for (int k = 0; k < vg.n_v; ++k) f.at(0, k) = eval_maxwellian(th, vg.nodes[k]);
    auto mom = dvm_moments(f, vg);
    CHECK(mom[0].rho == doctest::Approx(target.rho).epsilon(1e-12));
    CHECK(mom[0].mom == doctest::Approx(target.mom).epsilon(1e-11).scale(rho));
    CHECK(mom[0].energy == doctest::Approx(target.energy).epsilon(1e-12));
  }
}

TEST_CASE("uniform equilibrium is a discrete fixed point") {
  Grid1D grid = Grid1D::make(0.0, 1.0, 16);
  auto profile = std::vector<ConservedMoments>(16, conserved_from_primitives(1.0, 0.5, 1.5));
  VelocityGrid vg = velocity_grid_for(profile, 48);
  DvmSolver solver(profile, grid, vg, KnudsenConfig{1.0});
  auto m0 = solver.moments();
  for (int s = 0; s < 10; ++s) solver.step(solver.max_dt());
  auto m1 = solver.moments();
  for (int i = 0; i < 16; ++i) {
    CHECK(m1[i].rho == doctest::Approx(m0[i].rho).epsilon(1e-10));
    CHECK(m1[i].mom == doctest::Approx(m0[i].mom).epsilon(1e-10));
    CHECK(m1[i].energy == doctest::Approx(m0[i].energy).epsilon(1e-10));
  }
}

TEST_CASE("collisionless limit: relaxation is the identity") {
  Scenario sc = build_scenario("accuracy");
  Grid1D grid = sc.make_grid(32);
  auto profile = sc.cell_profile(grid);
  VelocityGrid vg = velocity_grid_for(profile, 32);
  DvmSolver a(profile, grid, vg, KnudsenConfig{1e12});
  DvmSolver b(profile, grid, vg, KnudsenConfig{1e30});
  double dt = a.max_dt();
  a.step(dt);
  b.step(dt);
  auto ma = a.moments();
  auto mb = b.moments();
  for (int i = 0; i < 32; ++i) {
    CHECK(ma[i].rho == doctest::Approx(mb[i].rho).epsilon(1e-12));
    CHECK(ma[i].energy == doctest::Approx(mb[i].energy).epsilon(1e-12));
  }
}

TEST_CASE("periodic conservation") {
  Scenario sc = build_scenario("accuracy");
  Grid1D grid = sc.make_grid(50);
  auto profile = sc.cell_profile(grid);
  VelocityGrid vg = velocity_grid_for(profile, 48);
  DvmSolver solver(profile, grid, vg, KnudsenConfig{1e-3});
  auto totals = [&](const std::vector<ConservedMoments>& m) {
    ConservedMoments t;
    for (const auto& U : m) t += U;
    return t;
  };
  ConservedMoments t0 = totals(solver.moments());
  for (int s = 0; s < 20; ++s) solver.step(solver.max_dt());
  ConservedMoments t1 = totals(solver.moments());
  CHECK(t1.rho == doctest::Approx(t0.rho).epsilon(1e-12));
  CHECK(t1.mom == doctest::Approx(t0.mom).epsilon(1e-12));
  CHECK(t1.energy == doctest::Approx(t0.energy).epsilon(1e-12));
}

TEST_CASE("cfl violation is rejected") {
  Grid1D grid = Grid1D::make(0.0, 1.0, 16);
  auto profile = std::vector<ConservedMoments>(16, conserved_from_primitives(1.0, 0.0, 1.0));
  VelocityGrid vg = velocity_grid_for(profile, 32);
  DvmSolver solver(profile, grid, vg, KnudsenConfig{1.0});
  CHECK_THROWS_AS(solver.step(2.0 * grid.dx / vg.v_max), ArgumentError);
}

TEST_CASE("fluid-limit agreement with the euler solver (quick)") {
  // The full t = 0.05 cross-check is an acceptance criterion; this runs a
  // shorter horizon at modest resolution.
  Scenario sc = build_scenario("accuracy");
  Grid1D grid = sc.make_grid(100);
  auto profile = sc.cell_profile(grid);
  const double t_end = 0.01;

  VelocityGrid vg = velocity_grid_for(profile, 64);
  DvmSolver dvm(profile, grid, vg, KnudsenConfig{1e-5});
  double t = 0.0;
  while (t < t_end * (1 - 1e-12)) {
    double dt = std::min(dvm.max_dt(), t_end - t);
    dvm.step(dt);
    t += dt;
  }

  MusclRelaxedSolver euler;
  auto field = profile;
  t = 0.0;
  while (t < t_end * (1 - 1e-12)) {
    double dt = std::min(euler.max_dt(field, grid), t_end - t);
    field = euler.step(field, dt, grid);
    t += dt;
  }

  auto err = l1_error(dvm.moments(), field, grid.dx);
  CHECK(err["rho"] < 5e-3);
  CHECK(err["u"] < 5e-3);
  CHECK(err["T"] < 1e-2);
}
