#include "chemokin/macro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "chemokin/elliptic.hpp"

namespace chemokin {

CflViolation::CflViolation(double dt, double required_dt)
    : std::invalid_argument("CFL violation: dt = " + std::to_string(dt) +
                            " exceeds the stable step " + std::to_string(required_dt)),
      dt_(dt),
      required_dt_(required_dt) {}

double max_stable_dt(const Grid& grid, const TurningModel& model, double cfl) {
  return cfl * grid.dx() / model.velocity_sup();
}

std::vector<double> edge_velocities(const Field& dS, const TurningModel& model) {
  const std::size_t n = dS.size();
  std::vector<double> u(n + 1);
  u[0] = model.velocity(dS[0]);
  u[n] = model.velocity(dS[n - 1]);
  for (std::size_t i = 1; i < n; ++i) u[i] = model.velocity(0.5 * (dS[i - 1] + dS[i]));
  return u;
}

UpwindResult upwind_advect(const Field& rho, std::span<const double> u, double dt) {
  const std::size_t n = rho.size();
  if (u.size() != n + 1) throw std::invalid_argument("upwind_advect: need n + 1 face velocities");
  std::vector<double> flux(n + 1);
  flux[0] = std::min(u[0], 0.0) * rho[0];
  flux[n] = std::max(u[n], 0.0) * rho[n - 1];
  for (std::size_t i = 1; i < n; ++i) {
    flux[i] = std::max(u[i], 0.0) * rho[i - 1] + std::min(u[i], 0.0) * rho[i];
  }
  const double lambda = dt / rho.grid().dx();
  Field out = rho;
  for (std::size_t i = 0; i < n; ++i) out[i] -= lambda * (flux[i + 1] - flux[i]);
  return {std::move(out), dt * (flux[n] - flux[0])};
}

UpwindResult upwind_step(const Field& rho, const MacroParams& params) {
  const double stable = max_stable_dt(rho.grid(), params.model, params.cfl);
  if (params.dt > stable * (1.0 + 1e-12)) throw CflViolation(params.dt, stable);
  const Field dS = grad_S(rho);
  return upwind_advect(rho, edge_velocities(dS, params.model), params.dt);
}

namespace {

// Step sizes of at most dt that land exactly on every probe and on t_end.
template <class Step, class Record>
std::size_t march(double dt, double t_end, std::span<const double> probes, Step&& step,
                  Record&& record) {
  std::vector<double> targets(probes.begin(), probes.end());
  for (double p : targets) {
    if (!(p >= 0.0) || p > t_end * (1.0 + 1e-12)) {
      throw std::invalid_argument("probe time outside [0, t_end]");
    }
  }
  std::sort(targets.begin(), targets.end());
  double t = 0.0;
  std::size_t steps = 0;
  std::size_t next = 0;
  while (next < targets.size() && targets[next] <= 0.0) record(0.0), ++next;
  const double horizon = targets.empty() ? t_end : std::max(t_end, targets.back());
  while (t < horizon * (1.0 - 1e-14)) {
    const double goal = next < targets.size() ? targets[next] : horizon;
    double h = std::min(dt, goal - t);
    // Avoid a sliver step right before a target.
    if (goal - t - h < 1e-9 * dt) h = goal - t;
    step(h);
    ++steps;
    t = (goal - t - h <= 0.0) ? goal : t + h;
    while (next < targets.size() && targets[next] <= t * (1.0 + 1e-14)) record(t), ++next;
  }
  return steps;
}

}  // namespace

MacroGridRun run_macro_grid(const Field& rho_ini, const MacroParams& params,
                            std::span<const double> probes) {
  require_finite(rho_ini, "run_macro_grid");
  const double stable = max_stable_dt(rho_ini.grid(), params.model, params.cfl);
  if (params.dt > stable * (1.0 + 1e-12)) throw CflViolation(params.dt, stable);
  MacroGridRun run;
  run.initial_mass = rho_ini.mass();
  Field rho = rho_ini;
  run.steps = march(
      params.dt, params.t_end, probes,
      [&](double h) {
        MacroParams p = params;
        p.dt = h;
        UpwindResult r = upwind_step(rho, p);
        rho = std::move(r.rho);
        run.outflow += r.outflow;
      },
      [&](double t) { run.snapshots.push_back({t, rho}); });
  return run;
}

std::vector<double> atom_velocities(std::span<const double> x, std::span<const double> w,
                                    const TurningModel& model) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs(n), ws(n), S(n), dS(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = x[order[k]];
    ws[k] = w[order[k]];
  }
  kernel_sums(xs, ws, xs, S, dS);
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[order[k]] = model.velocity(dS[k]);
  return v;
}

ParticleStepResult particle_step(const ParticleMeasure& mu, const MacroParams& params) {
  const auto x0 = mu.positions();
  const auto w = mu.weights();
  const std::size_t n = x0.size();
  const double dt = params.dt;

  const auto v0 = atom_velocities(x0, w, params.model);
  std::vector<double> mid(n), x1(n);
  for (std::size_t i = 0; i < n; ++i) mid[i] = x0[i] + 0.5 * dt * v0[i];
  const auto vm = atom_velocities(mid, w, params.model);
  for (std::size_t i = 0; i < n; ++i) x1[i] = x0[i] + dt * vm[i];

  // Merge in the pre-step order: an atom that overtook its left neighbour
  // (or cluster) at the midpoint or the end of the step, or ended within
  // merge_tol of it, joins it. Without the midpoint test two atoms that meet
  // in the first half step get reversed velocities and hover apart.
  struct Cluster {
    double mass;
    double moment;
    double moment_mid;
    std::size_t count;
    double x() const { return moment / mass; }
    double x_mid() const { return moment_mid / mass; }
  };
  std::vector<Cluster> stack;
  stack.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    stack.push_back({w[i], w[i] * x1[i], w[i] * mid[i], 1});
    while (stack.size() >= 2) {
      const Cluster& right = stack.back();
      const Cluster& left = stack[stack.size() - 2];
      if (right.x() - left.x() >= params.merge_tol && right.x_mid() > left.x_mid()) break;
      Cluster merged{left.mass + right.mass, left.moment + right.moment,
                     left.moment_mid + right.moment_mid, left.count + right.count};
      stack.pop_back();
      stack.back() = merged;
    }
  }

  ParticleStepResult result;
  std::vector<Atom> atoms;
  atoms.reserve(stack.size());
  for (const Cluster& c : stack) {
    atoms.push_back({c.x(), c.mass});
    if (c.count > 1) result.merges.push_back({0.0, c.x(), c.mass, c.count});
  }
  result.measure = ParticleMeasure(std::move(atoms));
  return result;
}

ParticleRun run_macro_particles(const ParticleMeasure& mu_ini, const MacroParams& params,
                                std::span<const double> probes) {
  ParticleRun run;
  ParticleMeasure mu = mu_ini;
  double t = 0.0;
  run.steps = march(
      params.dt, params.t_end, probes,
      [&](double h) {
        t += h;
        if (mu.size() <= 1) return;  // a lone atom is stationary
        MacroParams p = params;
        p.dt = h;
        ParticleStepResult r = particle_step(mu, p);
        for (MergeEvent& e : r.merges) {
          e.t = t;
          run.merges.push_back(e);
        }
        mu = std::move(r.measure);
      },
      [&](double tp) {
        t = tp;
        run.snapshots.push_back({tp, mu});
      });
  return run;
}

double linf_bound_horizon(double rho_ini_max, const TurningModel& model) {
  if (!(rho_ini_max > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * model.velocity_lipschitz() * rho_ini_max);
}

std::optional<double> linf_bound_curve(double rho_ini_max, const TurningModel& model, double t) {
  const double denom = 1.0 - 2.0 * model.velocity_lipschitz() * rho_ini_max * t;
  if (!(denom > 0.0)) return std::nullopt;
  return rho_ini_max / denom;
}

}  // namespace chemokin
