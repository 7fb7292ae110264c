#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chemokin/grid.hpp"
#include "chemokin/particles.hpp"
#include "chemokin/turning_model.hpp"

namespace chemokin {

// Limit equation d_t rho + d_x(a(K' * rho) rho) = 0.
struct MacroParams {
  TurningModel model{};
  double dt = 1e-3;
  double t_end = 1.0;
  // Grid mode requires dt * sup|a| <= cfl * dx. Positivity is guaranteed
  // for cfl <= 1/2 (a cell may lose mass through both faces).
  double cfl = 0.5;
  // Atoms closer than this after a particle step coalesce.
  double merge_tol = 1e-9;
};

class CflViolation : public std::invalid_argument {
 public:
  CflViolation(double dt, double required_dt);
  double dt() const { return dt_; }
  double required_dt() const { return required_dt_; }

 private:
  double dt_;
  double required_dt_;
};

// Largest dt satisfying the CFL invariant.
double max_stable_dt(const Grid& grid, const TurningModel& model, double cfl);

struct UpwindResult {
  Field rho;
  double outflow = 0.0;
};

// Interface velocities a((dS_i + dS_{i+1})/2); the two boundary faces use the
// adjacent cell. Returns n + 1 values.
std::vector<double> edge_velocities(const Field& dS, const TurningModel& model);

// Conservative first-order upwind update for prescribed face velocities.
// No inflow through the domain ends.
UpwindResult upwind_advect(const Field& rho, std::span<const double> face_velocity, double dt);

// One step of the limit equation. Throws CflViolation with the required dt.
UpwindResult upwind_step(const Field& rho, const MacroParams& params);

struct GridSnapshot {
  double t;
  Field rho;
};

struct MacroGridRun {
  std::vector<GridSnapshot> snapshots;
  std::size_t steps = 0;
  double initial_mass = 0.0;
  double outflow = 0.0;
};

// Steps of params.dt, shortened to land exactly on each probe time.
MacroGridRun run_macro_grid(const Field& rho_ini, const MacroParams& params,
                            std::span<const double> probes);

struct MergeEvent {
  double t = 0.0;
  double x = 0.0;       // position of the merged atom
  double w = 0.0;       // its weight
  std::size_t atoms = 0;  // number of atoms that coalesced
};

struct ParticleStepResult {
  ParticleMeasure measure;
  std::vector<MergeEvent> merges;  // t left at 0; the caller stamps it
};

// Velocity a(dS) of each atom, dS including every other atom (self-term 0).
// Positions need not be sorted.
std::vector<double> atom_velocities(std::span<const double> x, std::span<const double> w,
                                    const TurningModel& model);

// Midpoint (RK2) step of dX/dt = a(K' * mu)(X), then sticky merging: atoms
// that cross or come within merge_tol coalesce at their mass-weighted mean.
ParticleStepResult particle_step(const ParticleMeasure& mu, const MacroParams& params);

struct ParticleSnapshot {
  double t;
  ParticleMeasure measure;
};

struct ParticleRun {
  std::vector<ParticleSnapshot> snapshots;
  std::vector<MergeEvent> merges;
  std::size_t steps = 0;
};

ParticleRun run_macro_particles(const ParticleMeasure& mu_ini, const MacroParams& params,
                                std::span<const double> probes);

// First time at which 2 ||a'|| rho_max t = 1.
double linf_bound_horizon(double rho_ini_max, const TurningModel& model);
// rho_max / (1 - 2 ||a'|| rho_max t); nullopt once t reaches the horizon.
std::optional<double> linf_bound_curve(double rho_ini_max, const TurningModel& model, double t);

// Lagrangian reference solution of the limit equation for smooth data.
struct CharacteristicsOptions {
  std::size_t labels = 800;      // characteristic feet, uniform over the grid
  double dt = 1e-3;              // RK4 step
  double jacobian_floor = 1e-6;  // J below this counts as crossing
};

class CharacteristicsBreakdown : public std::runtime_error {
 public:
  explicit CharacteristicsBreakdown(double t);
  double time() const { return time_; }

 private:
  double time_;
};

// Integrates dX/ds = a(dS(X)) together with log J, d(log J)/ds = d_x a =
// a'(dS)(S - rho), and rebuilds rho(t, X) = rho_ini(X_0) / J on the grid of
// rho_ini. Throws CharacteristicsBreakdown if characteristics cross.
Field characteristics_oracle(const Field& rho_ini, const TurningModel& model, double t,
                             const CharacteristicsOptions& options = {});

// Time at which the characteristics first cross, or nullopt before t_max.
std::optional<double> characteristics_breakdown_time(const Field& rho_ini,
                                                     const TurningModel& model, double t_max,
                                                     const CharacteristicsOptions& options = {});

}  // namespace chemokin
