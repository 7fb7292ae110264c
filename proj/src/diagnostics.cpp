#include "chemokin/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemokin/elliptic.hpp"

namespace chemokin {

Energy energy(const Field& rho) {
  const Grid& g = rho.grid();
  const Potential p = solve_potential(rho);
  const double dx = g.dx();
  Energy e;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    e.pairing += 0.5 * rho[i] * p.S[i] * dx;
    e.field += 0.5 * (p.dS[i] * p.dS[i] + p.S[i] * p.S[i]) * dx;
  }
  // Outside the grid S decays like exp(-dist), so each tail holds S_edge^2 / 2.
  const auto xs = g.centers();
  std::vector<double> w(rho.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rho[i] * dx;
  const double ends[2] = {g.x_min(), g.x_max()};
  double S_end[2], dS_end[2];
  kernel_sums(xs, w, ends, S_end, dS_end);
  e.field += 0.5 * (S_end[0] * S_end[0] + S_end[1] * S_end[1]);
  return e;
}

Energy energy(const ParticleMeasure& mu) {
  const std::size_t n = mu.size();
  Energy e;
  if (n == 0) return e;
  const auto atoms = mu.atoms();
  // S = P e^{x - x_k} + Q e^{-(x - x_k)} between atoms k and k+1; Q holds
  // atoms at or left of x_k, P those strictly right.
  std::vector<double> Q(n), P(n, 0.0);
  Q[0] = 0.5 * atoms[0].w;
  for (std::size_t k = 1; k < n; ++k) {
    Q[k] = Q[k - 1] * std::exp(-(atoms[k].x - atoms[k - 1].x)) + 0.5 * atoms[k].w;
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    P[k] = (P[k + 1] + 0.5 * atoms[k + 1].w) * std::exp(-(atoms[k + 1].x - atoms[k].x));
  }
  for (std::size_t k = 0; k < n; ++k) e.pairing += 0.5 * atoms[k].w * (P[k] + Q[k]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double len = atoms[k + 1].x - atoms[k].x;
    const double P_end = P[k + 1] + 0.5 * atoms[k + 1].w;  // P e^{len}
    e.field += 0.5 * (P_end * P_end + Q[k] * Q[k]) * -std::expm1(-2.0 * len);
  }
  const double S_first = P[0] + Q[0];
  const double S_last = P[n - 1] + Q[n - 1];
  e.field += 0.5 * (S_first * S_first + S_last * S_last);
  return e;
}

double energy_production(const Field& rho, const TurningModel& model) {
  const Potential p = solve_potential(rho);
  const double R = p.dS.max_abs();
  if (!(R > 0.0)) return 0.0;
  const double zeta = model.coercivity(R);
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) sum += p.dS[i] * p.dS[i] * rho[i];
  return zeta * sum * rho.grid().dx();
}

EnergyGrowth energy_growth_monitor(std::span<const double> t, std::span<const double> E,
                                   bool symmetric_compact) {
  if (t.size() != E.size()) throw std::invalid_argument("energy_growth_monitor: size mismatch");
  EnergyGrowth g;
  g.symmetric_compact = symmetric_compact;
  if (t.size() < 2) return g;
  g.min_rate = std::numeric_limits<double>::infinity();
  g.envelope_slope = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double r = (E[k + 1] - E[k]) / (t[k + 1] - t[k]);
    g.rates.push_back(r);
    g.min_rate = std::min(g.min_rate, r);
  }
  for (std::size_t k = 1; k < t.size(); ++k) {
    g.envelope_slope = std::min(g.envelope_slope, (E[k] - E[0]) / (t[k] - t[0]));
  }
  return g;
}

bool is_symmetric_compact(const Field& rho, double tol, std::size_t margin) {
  const double m = rho.mass();
  if (!(m > 0.0)) return false;
  if (boundary_mass(rho, margin) > tol * m) return false;
  const Grid& g = rho.grid();
  double moment = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) moment += g.center(i) * rho[i] * g.dx();
  const double cm = moment / m;
  // Mirror index about cm: i + j = 2 (cm - x_min)/dx - 1.
  const double s = 2.0 * (cm - g.x_min()) / g.dx() - 1.0;
  const double sr = std::round(s);
  if (std::abs(s - sr) > 1e-6) return false;
  const auto sum = static_cast<long>(sr);
  const double scale = rho.max_abs();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const long j = sum - static_cast<long>(i);
    const double mirror =
        (j >= 0 && j < static_cast<long>(rho.size())) ? rho[static_cast<std::size_t>(j)] : 0.0;
    if (std::abs(rho[i] - mirror) > tol * scale) return false;
  }
  return true;
}

double flux_identity_residual(const Field& rho, const TurningModel& model, FluxStencil stencil) {
  const Potential p = solve_potential(rho);
  const std::size_t n = rho.size();
  const double dx = rho.grid().dx();
  std::vector<double> a(n), A(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = model.velocity(p.dS[i]);
    A[i] = model.velocity_potential(p.dS[i]);
  }
  double sum = 0.0;
  if (stencil == FluxStencil::interface) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dA = (A[i + 1] - A[i]) / dx;
      sum += std::abs(a[i] * rho[i] + dA - a[i] * p.S[i]);
    }
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double dA = (A[i + 1] - A[i - 1]) / (2.0 * dx);
      sum += std::abs(a[i] * rho[i] + dA - a[i] * p.S[i]);
    }
  }
  return sum * dx;
}

OslCheck osl_check(const Field& S, const Field& dS, const TurningModel& model) {
  OslCheck r;
  const std::size_t n = S.size();
  const double dx = S.grid().dx();
  double sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d = (model.velocity(dS[i + 1]) - model.velocity(dS[i - 1])) / (2.0 * dx);
    sup = std::max(sup, d);
  }
  r.sup = std::isfinite(sup) ? sup : 0.0;
  r.bound = model.velocity_lipschitz() * std::max(S.max(), 0.0);
  return r;
}

OslCheck osl_check(const Field& rho, const TurningModel& model) {
  const Potential p = solve_potential(rho);
  return osl_check(p.S, p.dS, model);
}

double equilibrium_residual(const KineticState& state, const Field& dS, const TurningModel& model) {
  const double c = model.c();
  double sum = 0.0;
  for (std::size_t i = 0; i < dS.size(); ++i) {
    sum += std::abs(model.phi(-c * dS[i]) * state.f_minus[i] - model.phi(c * dS[i]) * state.f_plus[i]);
  }
  return sum * dS.grid().dx();
}

bool is_concentrated(const Field& rho) {
  const double m = rho.mass();
  return m > 0.0 && rho.max() * rho.grid().dx() >= 0.5 * m;
}

BlowupBracket blowup_bracket(double rho_ini_max, double mass, double E0, double envelope_slope,
                             const TurningModel& model, std::optional<double> observed) {
  BlowupBracket b;
  b.lower = 1.0 / (2.0 * model.velocity_lipschitz() * rho_ini_max);
  if (envelope_slope > 0.0) b.upper = std::max(0.0, 0.5 * mass * mass - E0) / envelope_slope;
  b.observed = observed;
  return b;
}

DiagnosticsRow diagnose(double t, const Field& rho, const TurningModel& model) {
  DiagnosticsRow r;
  r.t = t;
  r.mass = rho.mass();
  r.linf = rho.max();
  const Energy e = energy(rho);
  r.energy_field = e.field;
  r.energy_pairing = e.pairing;
  const OslCheck o = osl_check(rho, model);
  r.osl_sup = o.sup;
  r.osl_bound = o.bound;
  r.flux_res = flux_identity_residual(rho, model);
  return r;
}

DiagnosticsRow diagnose(double t, const KineticState& state, const TurningModel& model) {
  const Field rho = state.density();
  DiagnosticsRow r = diagnose(t, rho, model);
  r.eq_res = equilibrium_residual(state, grad_S(rho), model);
  return r;
}

DiagnosticsRow diagnose(double t, const ParticleMeasure& mu, const Grid& grid,
                        const TurningModel& model) {
  DiagnosticsRow r;
  r.t = t;
  r.mass = mu.mass();
  const Energy e = energy(mu);
  r.energy_field = e.field;
  r.energy_pairing = e.pairing;
  Field S(grid), dS(grid);
  mu.potential_on_grid(grid, S.values(), dS.values());
  const OslCheck o = osl_check(S, dS, model);
  r.osl_sup = o.sup;
  r.osl_bound = o.bound;
  return r;
}

}  // namespace chemokin
