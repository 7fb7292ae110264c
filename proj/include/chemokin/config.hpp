#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemokin/grid.hpp"
#include "chemokin/particles.hpp"
#include "chemokin/turning_model.hpp"

namespace chemokin {

enum class Mode { kinetic, macro_grid, macro_particles, sweep, compare };
enum class Reference { none, macro_particles, macro_grid, smallest_eps };

const char* to_string(Mode m);
const char* to_string(Reference r);

struct GridSpec {
  double x_min = -2.0;
  double x_max = 2.0;
  std::size_t n = 1000;
  Grid grid() const { return Grid(x_min, x_max, n); }
};

struct InitialSpec {
  std::string kind = "gaussian";  // gaussian | two-bumps | bump | atoms | file
  double center = 0.0;            // gaussian, bump
  double sigma = 0.2;             // gaussian, two-bumps
  double mass = 1.0;              // gaussian, bump
  double delta = 0.5;             // bump half-width
  std::vector<double> centers;    // two-bumps
  std::vector<double> masses;     // two-bumps
  std::vector<Atom> atoms;        // atoms
  std::string path;               // file: CSV with columns x,rho
};

struct MacroSpec {
  double cfl = 0.5;
  std::optional<double> dt;  // default: the largest stable step
  double merge_tol = 1e-9;
  std::size_t particles = 0;  // quantile atoms for density data; 0 = grid size
};

// Physical units: speed c [m/s], length x0 [m], turning rates phi0 [1/s],
// times in seconds. Scaled time is t c / x0 and eps = c / (phi0 x0).
struct PhysicalSpec {
  double c = 20e-6;
  double x0 = 0.01;
  std::vector<double> phi0;
  double t_end = 80.0;
  std::vector<double> probes;
};

struct ExperimentConfig {
  std::string name = "run";
  std::string description;
  Mode mode = Mode::kinetic;
  GridSpec grid;
  TurningParams model;
  std::optional<double> eps;
  std::vector<double> eps_list;
  InitialSpec initial;
  double t_end = 1.0;
  std::vector<double> probes;  // defaults to {t_end}
  std::string output_dir;      // defaults to "chemokin_out/<name>"
  MacroSpec macro;
  Reference reference = Reference::none;
  double rho_ceiling = std::numeric_limits<double>::infinity();
  bool mollify = true;
  std::optional<PhysicalSpec> physical;
};

struct ConfigIssue {
  std::string path;  // e.g. "/macro/cfl"
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// Parses and validates a JSON document. Every problem is collected before
// throwing ConfigError. Relative file paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");

// Canonical JSON of a validated config (used for the manifest echo).
std::string config_to_json(const ExperimentConfig& config);

// Initial density sampled on the configured grid. Atom data is deposited.
Field initial_density(const ExperimentConfig& config);
// Initial measure for particle runs: atoms as given, or quantile atoms.
ParticleMeasure initial_measure(const ExperimentConfig& config);

}  // namespace chemokin
