#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "chemokin/grid.hpp"
#include "chemokin/particles.hpp"
#include "chemokin/turning_model.hpp"

namespace chemokin {

// Two-velocity distribution: f_plus moves at +c, f_minus at -c.
struct KineticState {
  Field f_plus;
  Field f_minus;
  double t = 0.0;

  const Grid& grid() const { return f_plus.grid(); }
  Field density() const { return f_plus + f_minus; }
  // J = c (f+ - f-).
  Field flux(double c) const;
  double mass() const { return f_plus.mass() + f_minus.mass(); }
};

enum class Boundary { absorbing, periodic };

struct TransportResult {
  KineticState state;
  double outflow = 0.0;  // mass that left through the domain ends
};

// Local equilibrium f(+-c) = phi(-+c dS) rho / (phi(c dS) + phi(-c dS)).
KineticState equilibrium(const Field& rho, const Field& dS, const TurningModel& model,
                         double t = 0.0);

// Exact characteristic shift over dt = dx/c: f+ moves one cell right, f- one
// cell left. Absorbing ends have zero inflow.
TransportResult transport_step(const KineticState& state, const TurningModel& model,
                               Boundary boundary = Boundary::absorbing);

// Closed-form relaxation over dt of df/dt = (lambda/eps)(f_eq - f) with
// lambda = 5/4 phi0 and dS frozen. rho = f+ + f- is unchanged.
KineticState collision_step(const KineticState& state, double eps, double dt, const Field& dS,
                            const TurningModel& model);

// Gaussian mollifier of width sigma, truncated at 6 sigma and renormalized
// per source so that mass is preserved exactly.
Field mollify(const Field& rho, double sigma);
Field mollify(const ParticleMeasure& mu, const Grid& grid, double sigma);
// Width used for initial data at relaxation parameter eps.
inline double mollifier_width(double eps, double dx) { return eps > 2.0 * dx ? eps : 2.0 * dx; }

struct KineticParams {
  double eps = 1e-2;
  TurningModel model{};
  double t_end = 1.0;
  // Abort once max rho exceeds this.
  double rho_ceiling = std::numeric_limits<double>::infinity();
  bool mollify_initial = true;
  Boundary boundary = Boundary::absorbing;
};

struct KineticSnapshot {
  KineticState state;
  Field S;
  Field dS;
  Field J;
};

struct KineticRun {
  std::vector<KineticSnapshot> snapshots;
  double dt = 0.0;
  std::size_t steps = 0;       // steps actually taken
  double initial_mass = 0.0;
  double outflow = 0.0;        // cumulative boundary loss
  bool aborted = false;
  std::string abort_reason;
};

// Time step locked to the grid, dt = dx/c.
double kinetic_time_step(const Grid& grid, const TurningModel& model);
// Step index recorded for each probe time (nearest step); throws
// std::invalid_argument for probes outside [0, t_end].
std::vector<std::size_t> probe_steps(std::span<const double> probes, double dt, double t_end);

// Splitting loop per step: potential, half collision, transport, potential,
// half collision. The initial state is the local equilibrium of the
// (optionally mollified) initial density.
KineticRun run_kinetic(const Field& rho_ini, const KineticParams& params,
                       std::span<const double> probes);
KineticRun run_kinetic(const ParticleMeasure& mu_ini, const Grid& grid,
                       const KineticParams& params, std::span<const double> probes);

}  // namespace chemokin
