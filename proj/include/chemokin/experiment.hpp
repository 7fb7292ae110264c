#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemokin/config.hpp"
#include "chemokin/csv.hpp"
#include "chemokin/diagnostics.hpp"
#include "chemokin/macro.hpp"

namespace chemokin {

enum class Solver { kinetic, macro_grid, macro_particles };
const char* to_string(Solver s);

// Everything recorded at one probe time. Particle runs deposit their atoms
// on the grid for rho and evaluate S, dS exactly at the cell centers.
struct ProbeRecord {
  double t = 0.0;
  Field rho;
  Field S;
  Field dS;
  std::optional<Field> f_plus;
  std::optional<Field> f_minus;
  std::optional<ParticleMeasure> atoms;
  DiagnosticsRow diagnostics;
};

struct RunRecord {
  std::string label;
  Solver solver = Solver::kinetic;
  std::optional<double> eps;
  std::vector<ProbeRecord> probes;
  std::vector<MergeEvent> merges;
  double dt = 0.0;
  std::size_t steps = 0;
  double initial_mass = 0.0;
  double initial_max = 0.0;
  double outflow = 0.0;
  bool symmetric_compact = false;
  bool aborted = false;
  std::string abort_reason;
};

// One solver run of the configured initial data. eps is required for the
// kinetic solver.
RunRecord simulate(const ExperimentConfig& config, Solver solver, std::optional<double> eps = {});

struct ConvergenceRow {
  double eps = 0.0;
  std::vector<double> w1;      // per probe
  std::vector<double> s_linf;  // ||S_eps - S_ref||_inf per probe
  std::vector<double> ds_l1;   // ||dS_eps - dS_ref||_L1 per probe
};

struct ConvergenceTable {
  std::vector<double> probes;
  std::vector<ConvergenceRow> rows;  // eps decreasing
  // Per probe: W1 does not increase as eps decreases.
  std::vector<bool> w1_monotone;
  // Per probe: ||S_eps - S_ref||_inf <= W1/2 + M dx/2 on every row
  // (K is 1/2-Lipschitz; the slack covers cell-center quadrature).
  std::vector<bool> s_lipschitz;
  // eps, then w1_t*, s_linf_t*, ds_l1_t* columns.
  CsvTable csv() const;
  // One row per probe with the two flags.
  CsvTable flags_csv() const;
};

// Rows against a reference run. Throws std::invalid_argument when grids or
// probe counts differ.
ConvergenceTable convergence_table(const std::vector<RunRecord>& members, const RunRecord& reference);

enum class Action { run, sweep, compare };

struct ExperimentResult {
  std::filesystem::path dir;
  std::vector<RunRecord> runs;
  std::optional<RunRecord> reference;
  std::optional<ConvergenceTable> convergence;
  bool aborted = false;
};

// CHEMOKIN_OUTPUT_ROOT, when set, replaces the configured directory with
// ROOT/<name>.
std::filesystem::path output_dir_for(const ExperimentConfig& config);

// Runs the configured experiment and writes every artifact under `dir` (or
// output_dir_for(config)). sweep and compare need an eps list; compare
// defaults the reference to the smallest eps. Throws ConfigError for
// unsuitable configs and IoError on write failures.
ExperimentResult run_experiment(const ExperimentConfig& config, Action action = Action::run,
                                std::optional<std::filesystem::path> dir = {});

// Artifacts of one run: snapshot, atom and diagnostics CSVs and SVG overlays.
void write_run(const RunRecord& run, const std::filesystem::path& dir);

}  // namespace chemokin
