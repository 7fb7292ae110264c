#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chemokin/grid.hpp"
#include "chemokin/kinetic.hpp"
#include "chemokin/particles.hpp"
#include "chemokin/turning_model.hpp"

namespace chemokin {

// E = 1/2 int (|dS|^2 + S^2) dx and the pairing 1/2 int rho S dx.
struct Energy {
  double field = 0.0;
  double pairing = 0.0;
};

// Field form: midpoint quadrature on the grid plus the exact contribution of
// the exponential tails outside it, 1/2 S(x_min)^2 + 1/2 S(x_max)^2.
Energy energy(const Field& rho);
// Both forms in closed form; they agree to rounding.
Energy energy(const ParticleMeasure& mu);

// Production term zeta int |dS|^2 rho dx with zeta = a(R)/R, R = ||dS||_inf.
double energy_production(const Field& rho, const TurningModel& model);

struct EnergyGrowth {
  std::vector<double> rates;   // (E_{k+1} - E_k) / (t_{k+1} - t_k)
  double min_rate = 0.0;       // 0 with fewer than two samples
  // Largest C with E_k >= E_0 + C (t_k - t_0) at every sample.
  double envelope_slope = 0.0;
  bool symmetric_compact = false;
};

EnergyGrowth energy_growth_monitor(std::span<const double> t, std::span<const double> E,
                                   bool symmetric_compact);

// Symmetric about its center of mass within tol (relative to max rho) and no
// mass within `margin` cells of the domain ends.
bool is_symmetric_compact(const Field& rho, double tol = 1e-12, std::size_t margin = 5);

enum class FluxStencil {
  interface,  // one-sided (A_{i+1} - A_i)/dx: first order
  centered3,  // (A_{i+1} - A_{i-1})/(2dx): second order
};

// L1 norm of a(dS) rho + d_x A(dS) - a(dS) S with S from solve_conv.
double flux_identity_residual(const Field& rho, const TurningModel& model,
                              FluxStencil stencil = FluxStencil::interface);

struct OslCheck {
  double sup = 0.0;    // max over interior cells of the centered d_x a(dS)
  double bound = 0.0;  // ||a'|| max(S, 0) = 8/5 c^2 ||phi'|| max(S, 0)
  bool holds(double tol = 1e-6) const { return sup <= bound + tol; }
};

OslCheck osl_check(const Field& rho, const TurningModel& model);
// Same with S and dS supplied (e.g. generated by atoms).
OslCheck osl_check(const Field& S, const Field& dS, const TurningModel& model);

// || phi(-c dS) f- - phi(c dS) f+ ||_L1.
double equilibrium_residual(const KineticState& state, const Field& dS, const TurningModel& model);

// Half the mass sits in one cell.
bool is_concentrated(const Field& rho);

// Lower end: the L-infinity bound horizon 1/(2 ||a'|| rho_max). Upper end:
// when the energy growth E_0 + C t would exceed the cap M^2/2 (needs C > 0).
struct BlowupBracket {
  double lower = 0.0;
  std::optional<double> upper;
  std::optional<double> observed;  // first concentrated probe or merge
};

BlowupBracket blowup_bracket(double rho_ini_max, double mass, double E0, double envelope_slope,
                             const TurningModel& model, std::optional<double> observed);

// One diagnostics sample; absent values are not applicable to the run.
struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  std::optional<double> linf;  // nullopt for atomic measures (blown up)
  double energy_field = 0.0;
  double energy_pairing = 0.0;
  double osl_sup = 0.0;
  double osl_bound = 0.0;
  std::optional<double> flux_res;
  std::optional<double> eq_res;
  std::optional<double> w1_ref;
};

DiagnosticsRow diagnose(double t, const Field& rho, const TurningModel& model);
DiagnosticsRow diagnose(double t, const KineticState& state, const TurningModel& model);
// Potentials are sampled on `grid` for the OSL check.
DiagnosticsRow diagnose(double t, const ParticleMeasure& mu, const Grid& grid,
                        const TurningModel& model);

}  // namespace chemokin
