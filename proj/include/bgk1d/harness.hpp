#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bgk1d/core.hpp"
#include "bgk1d/dvm.hpp"
#include "bgk1d/euler.hpp"
#include "bgk1d/hybrid.hpp"
#include "bgk1d/particles.hpp"

namespace bgk1d {

struct Scenario {
  std::string name;
  double x_min = 0.0;
  double x_max = 1.0;
  double t_final = 0.05;
  int default_cells = 200;
  int default_ppc = 200;
  BoundarySide left;
  BoundarySide right;
  std::function<ConservedMoments(double)> initial;

  Grid1D make_grid(int n_cells) const;
  std::vector<ConservedMoments> cell_profile(const Grid1D& grid) const;
};

// accuracy | shock | lax
Scenario build_scenario(const std::string& name);

struct RunConfig {
  std::string scenario = "accuracy";
  std::string solver = "fsi1";  // mcm | fsi | fsi1 | dvm | euler
  double epsilon = 1e-2;
  int cells = 0;          // 0: scenario default
  int ppc = 0;            // 0: scenario default
  double t_final = -1.0;  // < 0: scenario default
  std::uint64_t seed = 0;
  std::string fluid_solver = "muscl_relaxed";
  bool matching = true;
  std::string beta_estimator = "bound";
  std::string out_dir;    // empty: nothing written to disk
  std::string ref_cache;  // empty: references kept in memory only

  // Reference policy: DVM at ref_factor x cells with n_v velocity nodes.
  int ref_factor = 2;
  int n_v = 64;
  bool compute_errors = true;
};

struct TimePoint {
  double t = 0.0;
  long long n_particles = 0;
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
};

struct RunReport {
  RunConfig config;
  std::vector<double> x, rho, u, T, E, beta;
  std::vector<ConservedMoments> conserved;
  std::vector<TimePoint> series;
  std::map<std::string, double> l1;  // keys rho, u, T (present when computed)
  HybridDiagnostics diagnostics;
  long long n_steps = 0;
};

// L1 distances of (rho, u, T) between a solution field and a reference field;
// a finer reference is averaged (on the conserved variables) onto the run
// grid, which must divide it evenly.
std::map<std::string, double> l1_error(const std::vector<ConservedMoments>& solution,
                                       const std::vector<ConservedMoments>& reference,
                                       double dx);

// DVM reference profile for (scenario, epsilon), cached in memory and,
// when cache_dir is nonempty, on disk under a content hash of its config.
std::vector<ConservedMoments> dvm_reference(const Scenario& scenario, double epsilon,
                                            int cells, int n_v, double t_final,
                                            const std::string& cache_dir);

RunReport run(const RunConfig& config);

// Sweep config: flat key = value lines, keys identical to the CLI flags;
// `solver` and `epsilon` accept comma lists and are crossed.
std::vector<RunConfig> parse_sweep(const std::string& path);
std::vector<RunReport> bench(const std::string& sweep_path);

// CSV emission (17 significant digits, comma separated, LF endings).
void write_profile_csv(const std::string& path, const RunReport& report);
void write_timeseries_csv(const std::string& path, const RunReport& report);
void write_errors_csv(const std::string& path, const RunReport& report);
void write_report_json(const std::string& path, const RunReport& report);

// Profile CSV of an arbitrary conserved field (used for references).
void write_field_csv(const std::string& path, const Grid1D& grid,
                     const std::vector<ConservedMoments>& field);
std::vector<ConservedMoments> read_field_csv(const std::string& path);

}  // namespace bgk1d
