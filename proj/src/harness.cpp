#include "bgk1d/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bgk1d {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// FNV-1a over the canonical config string; names the reference cache files.
std::string content_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Totals {
  double mass = 0.0, momentum = 0.0, energy = 0.0;
};

Totals field_totals(const std::vector<ConservedMoments>& field, double dx) {
  KahanSum m, p, e;
  for (const auto& U : field) {
    m.add(U.rho);
    p.add(U.mom);
    e.add(U.energy);
  }
  return {m.value() * dx, p.value() * dx, e.value() * dx};
}

void fill_primitive_columns(RunReport& rep, const Grid1D& grid,
                            const std::vector<ConservedMoments>& field,
                            const std::vector<double>* beta) {
  const int n = grid.n_cells;
  rep.x.resize(n);
  rep.rho.resize(n);
  rep.u.resize(n);
  rep.T.resize(n);
  rep.E.resize(n);
  rep.beta.assign(n, 0.0);
  rep.conserved = field;
  for (int i = 0; i < n; ++i) {
    rep.x[i] = grid.center(i);
    rep.rho[i] = field[i].rho;
    rep.E[i] = field[i].energy;
    if (field[i].rho > 0.0) {
      double u = field[i].mom / field[i].rho;
      rep.u[i] = u;
      rep.T[i] = 2.0 * field[i].energy / field[i].rho - u * u;
    } else {
      rep.u[i] = 0.0;
      rep.T[i] = 0.0;
    }
    if (beta) rep.beta[i] = (*beta)[i];
  }
}

}  // namespace

Grid1D Scenario::make_grid(int n_cells) const {
  return Grid1D::make(x_min, x_max, n_cells, left, right);
}

std::vector<ConservedMoments> Scenario::cell_profile(const Grid1D& grid) const {
  std::vector<ConservedMoments> out(grid.n_cells);
  for (int i = 0; i < grid.n_cells; ++i) out[i] = initial(grid.center(i));
  return out;
}

Scenario build_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "accuracy") {
    s.t_final = 0.05;
    s.default_cells = 200;
    s.default_ppc = 200;
    s.left = {BoundaryKind::periodic, std::nullopt};
    s.right = {BoundaryKind::periodic, std::nullopt};
    s.initial = [](double x) {
      double w = std::sin(2.0 * M_PI * x);
      double rho = 1.0 + 0.3 * w;
      double u = 1.5 + 0.1 * w;
      double E = 2.5 + 1.0 * w;
      return ConservedMoments{rho, rho * u, E};
    };
    return s;
  }
  if (name == "shock") {
    s.t_final = 0.065;
    s.default_cells = 200;
    s.default_ppc = 500;
    ConservedMoments uniform{1.0, -1.0, 2.5};
    s.left = {BoundaryKind::specular_wall, std::nullopt};
    s.right = {BoundaryKind::inflow, uniform};
    s.initial = [uniform](double) { return uniform; };
    return s;
  }
  if (name == "lax") {
    s.t_final = 0.05;
    s.default_cells = 200;
    s.default_ppc = 500;
    ConservedMoments UL{0.445, 0.598, 3.5};
    ConservedMoments UR{0.5, 0.0, 0.48};
    s.left = {BoundaryKind::free_flow, UL};
    s.right = {BoundaryKind::free_flow, UR};
    s.initial = [UL, UR](double x) { return x < 0.5 ? UL : UR; };
    return s;
  }
  throw ArgumentError("unknown scenario: " + name);
}

std::map<std::string, double> l1_error(const std::vector<ConservedMoments>& solution,
                                       const std::vector<ConservedMoments>& reference,
                                       double dx) {
  const std::size_t n = solution.size();
  std::vector<ConservedMoments> ref;
  if (reference.size() == n) {
    ref = reference;
  } else if (n > 0 && reference.size() % n == 0) {
    std::size_t m = reference.size() / n;
    ref.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      ConservedMoments acc;
      for (std::size_t j = 0; j < m; ++j) acc += reference[i * m + j];
      ref[i] = acc * (1.0 / static_cast<double>(m));
    }
  } else {
    throw ArgumentError("l1_error: reference grid is not an integer refinement");
  }
  auto prim = [](const ConservedMoments& U, double& u, double& T) {
    if (U.rho > 0.0) {
      u = U.mom / U.rho;
      T = 2.0 * U.energy / U.rho - u * u;
    } else {
      u = 0.0;
      T = 0.0;
    }
  };
  KahanSum erho, eu, eT;
  for (std::size_t i = 0; i < n; ++i) {
    double us, Ts, ur, Tr;
    prim(solution[i], us, Ts);
    prim(ref[i], ur, Tr);
    erho.add(std::abs(solution[i].rho - ref[i].rho));
    eu.add(std::abs(us - ur));
    eT.add(std::abs(Ts - Tr));
  }
  return {{"rho", erho.value() * dx}, {"u", eu.value() * dx}, {"T", eT.value() * dx}};
}

std::vector<ConservedMoments> dvm_reference(const Scenario& scenario, double epsilon,
                                            int cells, int n_v, double t_final,
                                            const std::string& cache_dir) {
  std::ostringstream key;
  key << scenario.name << '|' << fmt17(epsilon) << '|' << cells << '|' << n_v << '|'
      << fmt17(t_final);
  static std::map<std::string, std::vector<ConservedMoments>> memory_cache;
  auto hit = memory_cache.find(key.str());
  if (hit != memory_cache.end()) return hit->second;

  std::string disk_path;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    disk_path = cache_dir + "/ref_" + scenario.name + "_" + content_hash(key.str()) + ".csv";
    if (std::filesystem::exists(disk_path)) {
      auto field = read_field_csv(disk_path);
      if (static_cast<int>(field.size()) == cells) {
        memory_cache[key.str()] = field;
        return field;
      }
    }
  }

  Grid1D grid = scenario.make_grid(cells);
  std::vector<ConservedMoments> profile = scenario.cell_profile(grid);
  VelocityGrid vgrid = velocity_grid_for(profile, n_v);
  DvmSolver solver(profile, grid, vgrid, KnudsenConfig{epsilon});
  double t = 0.0;
  const double dt_cfl = solver.max_dt(0.9);
  while (t < t_final * (1.0 - 1e-12)) {
    double dt = std::min(dt_cfl, t_final - t);
    solver.step(dt);
    t += dt;
  }
  std::vector<ConservedMoments> field = solver.moments();
  memory_cache[key.str()] = field;
  if (!disk_path.empty()) write_field_csv(disk_path, grid, field);
  return field;
}

namespace {

void record_point(RunReport& rep, double t, long long n_particles,
                  const std::vector<ConservedMoments>& field, double dx) {
  Totals tot = field_totals(field, dx);
  rep.series.push_back({t, n_particles, tot.mass, tot.momentum, tot.energy});
}

// Reruns a failing step's exception with the step index attached.
template <typename F>
auto with_step_context(long long step, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw SolverFailure("step " + std::to_string(step) + ": " + e.what());
  }
}

RunReport run_euler(const RunConfig& cfg, const Scenario& sc, const Grid1D& grid,
                    double t_final) {
  RunReport rep;
  auto solver = make_fluid_solver(cfg.fluid_solver);
  std::vector<ConservedMoments> field = sc.cell_profile(grid);
  record_point(rep, 0.0, 0, field, grid.dx);
  double t = 0.0;
  while (t < t_final * (1.0 - 1e-12)) {
    double dt = std::min(solver->max_dt(field, grid), t_final - t);
    field = with_step_context(rep.n_steps, [&] { return solver->step(field, dt, grid); });
    t += dt;
    ++rep.n_steps;
    record_point(rep, t, 0, field, grid.dx);
  }
  std::vector<double> ones(grid.n_cells, 1.0);
  fill_primitive_columns(rep, grid, field, &ones);
  return rep;
}

RunReport run_dvm(const RunConfig& cfg, const Scenario& sc, const Grid1D& grid,
                  double t_final) {
  RunReport rep;
  std::vector<ConservedMoments> profile = sc.cell_profile(grid);
  VelocityGrid vgrid = velocity_grid_for(profile, cfg.n_v);
  DvmSolver solver(profile, grid, vgrid, KnudsenConfig{cfg.epsilon});
  record_point(rep, 0.0, 0, solver.moments(), grid.dx);
  double t = 0.0;
  const double dt_cfl = solver.max_dt(0.9);
  while (t < t_final * (1.0 - 1e-12)) {
    double dt = std::min(dt_cfl, t_final - t);
    with_step_context(rep.n_steps, [&] { solver.step(dt); });
    t += dt;
    ++rep.n_steps;
    record_point(rep, t, 0, solver.moments(), grid.dx);
  }
  fill_primitive_columns(rep, grid, solver.moments(), nullptr);
  return rep;
}

RunReport run_mcm(const RunConfig& cfg, const Scenario& sc, const Grid1D& grid,
                  double t_final, int ppc) {
  RunReport rep;
  std::vector<ConservedMoments> profile = sc.cell_profile(grid);
  std::size_t n_total = static_cast<std::size_t>(grid.n_cells) * ppc;
  McmSolver solver(profile, grid, n_total, KnudsenConfig{cfg.epsilon},
                   McmConfig{cfg.matching, 4.0, false}, cfg.seed);
  record_point(rep, 0.0, static_cast<long long>(solver.buffer().size()),
               solver.cell_moments(), grid.dx);
  double t = 0.0;
  while (t < t_final * (1.0 - 1e-12)) {
    double dt = std::min(solver.max_dt(), t_final - t);
    with_step_context(rep.n_steps, [&] { solver.step(dt); });
    t += dt;
    ++rep.n_steps;
    record_point(rep, t, static_cast<long long>(solver.buffer().size()),
                 solver.cell_moments(), grid.dx);
  }
  rep.diagnostics.matching_deficits = solver.matching_deficits();
  fill_primitive_columns(rep, grid, solver.cell_moments(), nullptr);
  return rep;
}

RunReport run_hybrid(const RunConfig& cfg, const Scenario& sc, const Grid1D& grid,
                     double t_final, int ppc) {
  RunReport rep;
  FsiConfig fsi;
  fsi.variant = cfg.solver == "fsi1" ? FsiConfig::Variant::fsi1 : FsiConfig::Variant::fsi;
  fsi.matching = cfg.matching;
  fsi.fluid_solver = cfg.fluid_solver;
  if (cfg.beta_estimator == "bound") {
    fsi.beta_estimator = FsiConfig::BetaEstimator::bound;
  } else if (cfg.beta_estimator == "reconstruction") {
    fsi.beta_estimator = FsiConfig::BetaEstimator::reconstruction;
  } else {
    throw ArgumentError("unknown beta estimator: " + cfg.beta_estimator);
  }
  fsi.validate();

  auto fluid = make_fluid_solver(cfg.fluid_solver);
  std::vector<ConservedMoments> profile = sc.cell_profile(grid);
  std::size_t n_total = static_cast<std::size_t>(grid.n_cells) * ppc;
  KnudsenConfig kn{cfg.epsilon};

  double dt0 = std::min(particle_dt_bound(profile, grid, fsi), fluid->max_dt(profile, grid));
  HybridState state =
      initialize_hybrid(profile, grid, n_total, cfg.epsilon, dt0, cfg.seed, cfg.matching);
  record_point(rep, 0.0, static_cast<long long>(state.buffer.size()), state.U, grid.dx);
  double t = 0.0;
  while (t < t_final * (1.0 - 1e-12)) {
    double dt = std::min({particle_dt_bound(state.U, grid, fsi),
                          fluid->max_dt(state.U, grid), t_final - t});
    with_step_context(rep.n_steps, [&] {
      if (fsi.variant == FsiConfig::Variant::fsi1)
        fsi1_step(state, dt, kn, *fluid, fsi, cfg.seed);
      else
        fsi_step(state, dt, kn, *fluid, fsi, cfg.seed);
    });
    t += dt;
    ++rep.n_steps;
    record_point(rep, t, static_cast<long long>(state.buffer.size()), state.U, grid.dx);
  }
  rep.diagnostics = state.diag;
  fill_primitive_columns(rep, grid, state.U, &state.beta);
  return rep;
}

}  // namespace

RunReport run(const RunConfig& config) {
  Scenario sc = build_scenario(config.scenario);
  int cells = config.cells > 0 ? config.cells : sc.default_cells;
  int ppc = config.ppc > 0 ? config.ppc : sc.default_ppc;
  double t_final = config.t_final >= 0.0 ? config.t_final : sc.t_final;
  Grid1D grid = sc.make_grid(cells);

  RunReport rep;
  if (config.solver == "euler") {
    rep = run_euler(config, sc, grid, t_final);
  } else if (config.solver == "dvm") {
    rep = run_dvm(config, sc, grid, t_final);
  } else if (config.solver == "mcm") {
    rep = run_mcm(config, sc, grid, t_final, ppc);
  } else if (config.solver == "fsi" || config.solver == "fsi1") {
    rep = run_hybrid(config, sc, grid, t_final, ppc);
  } else {
    throw ArgumentError("unknown solver: " + config.solver);
  }
  rep.config = config;
  rep.config.cells = cells;
  rep.config.ppc = ppc;
  rep.config.t_final = t_final;

  if (config.compute_errors) {
    std::vector<ConservedMoments> ref = dvm_reference(
        sc, config.epsilon, cells * config.ref_factor, config.n_v, t_final,
        config.ref_cache);
    rep.l1 = l1_error(rep.conserved, ref, grid.dx);
  }

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_profile_csv(config.out_dir + "/profile.csv", rep);
    write_timeseries_csv(config.out_dir + "/timeseries.csv", rep);
    if (!rep.l1.empty()) write_errors_csv(config.out_dir + "/errors.csv", rep);
    write_report_json(config.out_dir + "/report.json", rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sweep configs
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  std::size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<RunConfig> parse_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open sweep config: " + path);
  RunConfig base;
  std::vector<std::string> solvers{base.solver};
  std::vector<std::string> epsilons;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ArgumentError("sweep config: expected key = value, got: " + t);
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key == "scenario") {
      base.scenario = val;
    } else if (key == "solver") {
      solvers = split_list(val);
    } else if (key == "epsilon") {
      epsilons = split_list(val);
    } else if (key == "cells") {
      base.cells = std::stoi(val);
    } else if (key == "ppc") {
      base.ppc = std::stoi(val);
    } else if (key == "tfinal") {
      base.t_final = std::stod(val);
    } else if (key == "seed") {
      base.seed = std::stoull(val);
    } else if (key == "fluid-solver") {
      base.fluid_solver = val;
    } else if (key == "matching") {
      base.matching = val == "on";
    } else if (key == "beta-estimator") {
      base.beta_estimator = val;
    } else if (key == "out") {
      base.out_dir = val;
    } else if (key == "ref-cache") {
      base.ref_cache = val;
    } else if (key == "nv") {
      base.n_v = std::stoi(val);
    } else {
      throw ArgumentError("sweep config: unknown key: " + key);
    }
  }
  if (epsilons.empty()) epsilons.push_back(fmt17(base.epsilon));
  std::vector<RunConfig> out;
  std::string root = base.out_dir;
  for (const auto& sv : solvers) {
    for (const auto& ep : epsilons) {
      RunConfig c = base;
      c.solver = sv;
      c.epsilon = std::stod(ep);
      if (!root.empty()) {
        std::ostringstream dir;
        dir << root << '/' << c.scenario << '_' << sv << "_eps" << ep;
        c.out_dir = dir.str();
      }
      out.push_back(c);
    }
  }
  return out;
}

std::vector<RunReport> bench(const std::string& sweep_path) {
  std::vector<RunConfig> configs = parse_sweep(sweep_path);
  std::vector<RunReport> reports;
  reports.reserve(configs.size());
  std::string root;
  for (const auto& c : configs) {
    reports.push_back(run(c));
    if (!c.out_dir.empty() && root.empty())
      root = std::filesystem::path(c.out_dir).parent_path().string();
  }
  if (!root.empty()) {
    std::ofstream out(root + "/summary.csv", std::ios::binary);
    out << "scenario,solver,epsilon,seed,l1_rho,l1_u,l1_T,n_steps\n";
    for (const auto& r : reports) {
      out << r.config.scenario << ',' << r.config.solver << ','
          << fmt17(r.config.epsilon) << ',' << r.config.seed << ','
          << fmt17(r.l1.count("rho") ? r.l1.at("rho") : 0.0) << ','
          << fmt17(r.l1.count("u") ? r.l1.at("u") : 0.0) << ','
          << fmt17(r.l1.count("T") ? r.l1.at("T") : 0.0) << ',' << r.n_steps << '\n';
    }
  }
  return reports;
}

// ---------------------------------------------------------------------------
// CSV / JSON output
// ---------------------------------------------------------------------------

void write_profile_csv(const std::string& path, const RunReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << "x,rho,u,T,E,beta\n";
  for (std::size_t i = 0; i < report.x.size(); ++i) {
    out << fmt17(report.x[i]) << ',' << fmt17(report.rho[i]) << ',' << fmt17(report.u[i])
        << ',' << fmt17(report.T[i]) << ',' << fmt17(report.E[i]) << ','
        << fmt17(report.beta[i]) << '\n';
  }
}

void write_timeseries_csv(const std::string& path, const RunReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << "t,n_particles,mass,momentum,energy\n";
  for (const auto& p : report.series) {
    out << fmt17(p.t) << ',' << p.n_particles << ',' << fmt17(p.mass) << ','
        << fmt17(p.momentum) << ',' << fmt17(p.energy) << '\n';
  }
}

void write_errors_csv(const std::string& path, const RunReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << "field,l1_error\n";
  for (const char* f : {"rho", "u", "T"}) {
    if (report.l1.count(f)) out << f << ',' << fmt17(report.l1.at(f)) << '\n';
  }
}

void write_report_json(const std::string& path, const RunReport& report) {
  nlohmann::json j;
  j["config"] = {{"scenario", report.config.scenario},
                 {"solver", report.config.solver},
                 {"epsilon", report.config.epsilon},
                 {"cells", report.config.cells},
                 {"ppc", report.config.ppc},
                 {"tfinal", report.config.t_final},
                 {"seed", report.config.seed},
                 {"fluid_solver", report.config.fluid_solver},
                 {"matching", report.config.matching},
                 {"beta_estimator", report.config.beta_estimator}};
  j["n_steps"] = report.n_steps;
  j["l1"] = report.l1;
  j["diagnostics"] = {{"clamp_count", report.diagnostics.clamp_count},
                      {"matching_deficits", report.diagnostics.matching_deficits},
                      {"tagged_deficits", report.diagnostics.tagged_deficits},
                      {"capacity_discards", report.diagnostics.capacity_discards}};
  if (!report.series.empty()) {
    const auto& last = report.series.back();
    j["final_totals"] = {{"mass", last.mass},
                         {"momentum", last.momentum},
                         {"energy", last.energy},
                         {"n_particles", last.n_particles}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_field_csv(const std::string& path, const Grid1D& grid,
                     const std::vector<ConservedMoments>& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << "x,rho,u,T,E,beta\n";
  for (int i = 0; i < grid.n_cells; ++i) {
    const auto& U = field[i];
    double u = 0.0, T = 0.0;
    if (U.rho > 0.0) {
      u = U.mom / U.rho;
      T = 2.0 * U.energy / U.rho - u * u;
    }
    out << fmt17(grid.center(i)) << ',' << fmt17(U.rho) << ',' << fmt17(u) << ','
        << fmt17(T) << ',' << fmt17(U.energy) << ",0\n";
  }
}

std::vector<ConservedMoments> read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<ConservedMoments> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 6> vals{};
    std::size_t pos = 0;
    for (int c = 0; c < 6; ++c) {
      std::size_t next = line.find(',', pos);
      std::string tok = next == std::string::npos ? line.substr(pos) : line.substr(pos, next - pos);
      vals[c] = std::stod(tok);
      pos = next == std::string::npos ? line.size() : next + 1;
    }
    // columns: x, rho, u, T, E, beta -> conserved (rho, rho u, E)
    out.push_back({vals[1], vals[1] * vals[2], vals[4]});
  }
  return out;
}

}  // namespace bgk1d
