#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bgk1d/harness.hpp"

namespace {

void print_report(const bgk1d::RunReport& rep) {
  std::printf("run: scenario=%s solver=%s epsilon=%g cells=%d ppc=%d tfinal=%g seed=%llu\n",
              rep.config.scenario.c_str(), rep.config.solver.c_str(), rep.config.epsilon,
              rep.config.cells, rep.config.ppc, rep.config.t_final,
              static_cast<unsigned long long>(rep.config.seed));
  std::printf("  steps=%lld", rep.n_steps);
  if (!rep.series.empty()) {
    const auto& last = rep.series.back();
    std::printf("  particles=%lld  mass=%.12g  momentum=%.12g  energy=%.12g",
                last.n_particles, last.mass, last.momentum, last.energy);
  }
  std::printf("\n");
  if (!rep.l1.empty()) {
    std::printf("  L1 errors vs DVM reference:  rho=%.6g  u=%.6g  T=%.6g\n",
                rep.l1.at("rho"), rep.l1.at("u"), rep.l1.at("T"));
  }
  if (rep.diagnostics.clamp_count || rep.diagnostics.matching_deficits ||
      rep.diagnostics.tagged_deficits || rep.diagnostics.capacity_discards) {
    std::printf("  diagnostics: clamps=%lld matching_deficits=%lld tagged_deficits=%lld "
                "capacity_discards=%lld\n",
                rep.diagnostics.clamp_count, rep.diagnostics.matching_deficits,
                rep.diagnostics.tagged_deficits, rep.diagnostics.capacity_discards);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-D multiscale solver suite for the Boltzmann-BGK equation"};
  app.require_subcommand(1);

  bgk1d::RunConfig cfg;
  std::string matching = "on";

  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario with one solver");
  run_cmd->add_option("--scenario", cfg.scenario, "accuracy | shock | lax");
  run_cmd->add_option("--solver", cfg.solver, "mcm | fsi | fsi1 | dvm | euler");
  run_cmd->add_option("--epsilon", cfg.epsilon, "Knudsen number");
  run_cmd->add_option("--cells", cfg.cells, "space cells (0: scenario default)");
  run_cmd->add_option("--ppc", cfg.ppc, "initial particles per cell (0: default)");
  run_cmd->add_option("--tfinal", cfg.t_final, "final time (<0: scenario default)");
  run_cmd->add_option("--seed", cfg.seed, "RNG seed");
  run_cmd->add_option("--fluid-solver", cfg.fluid_solver, "muscl_relaxed | lax_friedrichs");
  run_cmd->add_option("--matching", matching, "on | off");
  run_cmd->add_option("--beta-estimator", cfg.beta_estimator, "bound | reconstruction");
  run_cmd->add_option("--out", cfg.out_dir, "output directory for CSV/JSON");
  run_cmd->add_option("--ref-cache", cfg.ref_cache, "reference cache directory");
  run_cmd->add_option("--nv", cfg.n_v, "velocity nodes for DVM / references");
  run_cmd->add_flag("--no-errors", "skip reference generation and error metrics");

  std::string sweep_path;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a sweep from a config file");
  bench_cmd->add_option("--sweep", sweep_path, "flat key = value config file")->required();

  std::string ref_scenario = "accuracy";
  double ref_epsilon = 1e-4;
  int ref_cells = 400;
  int ref_nv = 64;
  double ref_tfinal = -1.0;
  std::string ref_out;
  CLI::App* ref_cmd = app.add_subcommand("reference", "write a DVM reference profile");
  ref_cmd->add_option("--scenario", ref_scenario, "accuracy | shock | lax");
  ref_cmd->add_option("--epsilon", ref_epsilon, "Knudsen number");
  ref_cmd->add_option("--cells", ref_cells, "reference cells");
  ref_cmd->add_option("--nv", ref_nv, "velocity nodes");
  ref_cmd->add_option("--tfinal", ref_tfinal, "final time (<0: scenario default)");
  ref_cmd->add_option("--out", ref_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      cfg.matching = matching == "on";
      if (run_cmd->count("--no-errors")) cfg.compute_errors = false;
      print_report(bgk1d::run(cfg));
    } else if (bench_cmd->parsed()) {
      auto reports = bgk1d::bench(sweep_path);
      for (const auto& r : reports) print_report(r);
    } else if (ref_cmd->parsed()) {
      bgk1d::Scenario sc = bgk1d::build_scenario(ref_scenario);
      double tf = ref_tfinal >= 0.0 ? ref_tfinal : sc.t_final;
      bgk1d::Grid1D grid = sc.make_grid(ref_cells);
      auto field = bgk1d::dvm_reference(sc, ref_epsilon, ref_cells, ref_nv, tf, "");
      bgk1d::write_field_csv(ref_out, grid, field);
      std::printf("reference written to %s (%d cells, nv=%d, t=%g)\n", ref_out.c_str(),
                  ref_cells, ref_nv, tf);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
