#include "chemokin/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chemokin/elliptic.hpp"

namespace chemokin {

Field KineticState::flux(double c) const {
  Field J = f_plus - f_minus;
  J *= c;
  return J;
}

KineticState equilibrium(const Field& rho, const Field& dS, const TurningModel& model,
                         double t) {
  const double c = model.c();
  const double rate = model.relaxation_rate();
  Field fp(rho.grid());
  Field fm(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    fp[i] = model.phi(-c * dS[i]) * rho[i] / rate;
    fm[i] = model.phi(c * dS[i]) * rho[i] / rate;
  }
  return {std::move(fp), std::move(fm), t};
}

TransportResult transport_step(const KineticState& state, const TurningModel& model,
                               Boundary boundary) {
  const std::size_t n = state.f_plus.size();
  const double dx = state.grid().dx();
  Field fp(state.grid());
  Field fm(state.grid());
  for (std::size_t i = 1; i < n; ++i) fp[i] = state.f_plus[i - 1];
  for (std::size_t i = 0; i + 1 < n; ++i) fm[i] = state.f_minus[i + 1];
  double outflow = 0.0;
  if (boundary == Boundary::periodic) {
    fp[0] = state.f_plus[n - 1];
    fm[n - 1] = state.f_minus[0];
  } else {
    outflow = (state.f_plus[n - 1] + state.f_minus[0]) * dx;
  }
  return {{std::move(fp), std::move(fm), state.t + dx / model.c()}, outflow};
}

KineticState collision_step(const KineticState& state, double eps, double dt, const Field& dS,
                            const TurningModel& model) {
  if (!(eps > 0.0)) throw std::invalid_argument("collision_step: eps must be positive");
  const double c = model.c();
  const double rate = model.relaxation_rate();
  const double damp = std::exp(-rate * dt / eps);
  KineticState out = state;
  for (std::size_t i = 0; i < state.f_plus.size(); ++i) {
    const double rho = state.f_plus[i] + state.f_minus[i];
    const double eq_p = model.phi(-c * dS[i]) * rho / rate;
    const double eq_m = model.phi(c * dS[i]) * rho / rate;
    out.f_plus[i] = eq_p + (state.f_plus[i] - eq_p) * damp;
    out.f_minus[i] = eq_m + (state.f_minus[i] - eq_m) * damp;
  }
  return out;
}

namespace {

void spread(double x, double w, const Grid& grid, double sigma, Field& out) {
  const double reach = 6.0 * sigma;
  const double dx = grid.dx();
  const auto lo_s = std::ceil((x - reach - grid.x_min()) / dx - 0.5);
  const auto hi_s = std::floor((x + reach - grid.x_min()) / dx - 0.5);
  const long lo = std::max(0L, static_cast<long>(lo_s));
  const long hi = std::min(static_cast<long>(grid.size()) - 1, static_cast<long>(hi_s));
  if (hi < lo) {
    out[grid.cell_of(x)] += w / dx;
    return;
  }
  double norm = 0.0;
  for (long i = lo; i <= hi; ++i) {
    const double z = (grid.center(static_cast<std::size_t>(i)) - x) / sigma;
    norm += std::exp(-0.5 * z * z);
  }
  for (long i = lo; i <= hi; ++i) {
    const double z = (grid.center(static_cast<std::size_t>(i)) - x) / sigma;
    out[static_cast<std::size_t>(i)] += w * std::exp(-0.5 * z * z) / (norm * dx);
  }
}

}  // namespace

Field mollify(const Field& rho, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("mollify: sigma must be positive");
  const Grid& g = rho.grid();
  Field out(g);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] != 0.0) spread(g.center(i), rho[i] * g.dx(), g, sigma, out);
  }
  return out;
}

Field mollify(const ParticleMeasure& mu, const Grid& grid, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("mollify: sigma must be positive");
  Field out(grid);
  for (const Atom& a : mu.atoms()) spread(a.x, a.w, grid, sigma, out);
  return out;
}

double kinetic_time_step(const Grid& grid, const TurningModel& model) {
  return grid.dx() / model.c();
}

std::vector<std::size_t> probe_steps(std::span<const double> probes, double dt, double t_end) {
  std::vector<std::size_t> steps;
  steps.reserve(probes.size());
  for (double t : probes) {
    if (!(t >= 0.0) || t > t_end * (1.0 + 1e-12)) {
      throw std::invalid_argument("probe time outside [0, t_end]");
    }
    steps.push_back(static_cast<std::size_t>(std::llround(t / dt)));
  }
  return steps;
}

namespace {

KineticRun run_from_density(Field rho0, const KineticParams& params,
                            std::span<const double> probes) {
  const TurningModel& model = params.model;
  const Grid grid = rho0.grid();
  KineticRun run;
  run.dt = kinetic_time_step(grid, model);
  const auto total = static_cast<std::size_t>(std::llround(params.t_end / run.dt));
  const auto record_at = probe_steps(probes, run.dt, params.t_end);
  const double c = model.c();

  Potential pot = solve_potential(rho0);
  KineticState state = equilibrium(rho0, pot.dS, model, 0.0);
  run.initial_mass = state.mass();

  auto record = [&](const KineticState& s, const Potential& p) {
    run.snapshots.push_back({s, p.S, p.dS, s.flux(c)});
  };
  std::size_t next = 0;
  while (next < record_at.size() && record_at[next] == 0) {
    record(state, pot);
    ++next;
  }

  for (std::size_t step = 1; step <= total; ++step) {
    state = collision_step(state, params.eps, 0.5 * run.dt, pot.dS, model);
    TransportResult moved = transport_step(state, model, params.boundary);
    run.outflow += moved.outflow;
    state = std::move(moved.state);
    state.t = static_cast<double>(step) * run.dt;
    pot = solve_potential(state.density());
    state = collision_step(state, params.eps, 0.5 * run.dt, pot.dS, model);
    run.steps = step;

    while (next < record_at.size() && record_at[next] == step) {
      record(state, pot);
      ++next;
    }
    const double peak = state.density().max();
    if (!(peak <= params.rho_ceiling)) {
      run.aborted = true;
      run.abort_reason = "max density " + std::to_string(peak) + " exceeded ceiling at t = " +
                         std::to_string(state.t);
      break;
    }
  }
  return run;
}

}  // namespace

KineticRun run_kinetic(const Field& rho_ini, const KineticParams& params,
                       std::span<const double> probes) {
  require_finite(rho_ini, "run_kinetic");
  if (rho_ini.min() < 0.0) throw std::invalid_argument("run_kinetic: negative initial density");
  Field rho0 = params.mollify_initial
                   ? mollify(rho_ini, mollifier_width(params.eps, rho_ini.grid().dx()))
                   : rho_ini;
  return run_from_density(std::move(rho0), params, probes);
}

KineticRun run_kinetic(const ParticleMeasure& mu_ini, const Grid& grid,
                       const KineticParams& params, std::span<const double> probes) {
  return run_from_density(mollify(mu_ini, grid, mollifier_width(params.eps, grid.dx())), params,
                          probes);
}

}  // namespace chemokin
