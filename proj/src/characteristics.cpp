#include <algorithm>
#include <cmath>
#include <string>

#include "chemokin/elliptic.hpp"
#include "chemokin/macro.hpp"

namespace chemokin {

CharacteristicsBreakdown::CharacteristicsBreakdown(double t)
    : std::runtime_error("characteristics crossed at t = " + std::to_string(t)), time_(t) {}

namespace {

double interpolate(const Field& f, double x) {
  const Grid& g = f.grid();
  const double s = (x - g.center(0)) / g.dx();
  if (s <= 0.0) return f[0];
  const auto last = static_cast<double>(f.size() - 1);
  if (s >= last) return f[f.size() - 1];
  const auto i = static_cast<std::size_t>(s);
  const double th = s - static_cast<double>(i);
  return (1.0 - th) * f[i] + th * f[i + 1];
}

// Labels xi_k with weights m_k = rho_ini(xi_k) h (trapezoid in the label).
struct Cloud {
  std::vector<double> rho0;  // rho_ini at the labels
  std::vector<double> m;
  std::vector<double> X;
  std::vector<double> L;  // log J
};

Cloud seed(const Field& rho_ini, std::size_t labels) {
  if (labels < 2) throw std::invalid_argument("characteristics: need at least 2 labels");
  const Grid& g = rho_ini.grid();
  const double a = g.center(0);
  const double b = g.center(g.size() - 1);
  const double h = (b - a) / static_cast<double>(labels - 1);
  Cloud c;
  c.rho0.resize(labels);
  c.m.resize(labels);
  c.X.resize(labels);
  c.L.assign(labels, 0.0);
  for (std::size_t k = 0; k < labels; ++k) {
    c.X[k] = a + static_cast<double>(k) * h;
    c.rho0[k] = interpolate(rho_ini, c.X[k]);
    c.m[k] = c.rho0[k] * h * ((k == 0 || k + 1 == labels) ? 0.5 : 1.0);
  }
  return c;
}

bool ordered(const std::vector<double>& X) {
  for (std::size_t k = 1; k < X.size(); ++k) {
    if (!(X[k] > X[k - 1])) return false;
  }
  return true;
}

// Right-hand side for (X, L); false if the cloud lost its ordering.
bool rhs(const Cloud& c, const std::vector<double>& X, const std::vector<double>& L,
         const TurningModel& model, std::vector<double>& dX, std::vector<double>& dL) {
  if (!ordered(X)) return false;
  const std::size_t n = X.size();
  std::vector<double> S(n), dS(n);
  kernel_sums(X, c.m, X, S, dS);
  for (std::size_t k = 0; k < n; ++k) {
    const double rho = c.rho0[k] * std::exp(-L[k]);
    dX[k] = model.velocity(dS[k]);
    dL[k] = model.velocity_derivative(dS[k]) * (S[k] - rho);
  }
  return true;
}

// Integrates the cloud to time t. Returns the breakdown time if the
// characteristics cross before t.
std::optional<double> integrate(Cloud& c, const TurningModel& model, double t,
                                const CharacteristicsOptions& opt) {
  const std::size_t n = c.X.size();
  const double floor_log = std::log(opt.jacobian_floor);
  std::vector<double> k1x(n), k1l(n), k2x(n), k2l(n), k3x(n), k3l(n), k4x(n), k4l(n);
  std::vector<double> tx(n), tl(n);
  double s = 0.0;
  while (s < t * (1.0 - 1e-14)) {
    const double h = std::min(opt.dt, t - s);
    bool ok = rhs(c, c.X, c.L, model, k1x, k1l);
    for (std::size_t k = 0; ok && k < n; ++k) {
      tx[k] = c.X[k] + 0.5 * h * k1x[k];
      tl[k] = c.L[k] + 0.5 * h * k1l[k];
    }
    ok = ok && rhs(c, tx, tl, model, k2x, k2l);
    for (std::size_t k = 0; ok && k < n; ++k) {
      tx[k] = c.X[k] + 0.5 * h * k2x[k];
      tl[k] = c.L[k] + 0.5 * h * k2l[k];
    }
    ok = ok && rhs(c, tx, tl, model, k3x, k3l);
    for (std::size_t k = 0; ok && k < n; ++k) {
      tx[k] = c.X[k] + h * k3x[k];
      tl[k] = c.L[k] + h * k3l[k];
    }
    ok = ok && rhs(c, tx, tl, model, k4x, k4l);
    if (!ok) return s;
    for (std::size_t k = 0; k < n; ++k) {
      c.X[k] += h / 6.0 * (k1x[k] + 2.0 * k2x[k] + 2.0 * k3x[k] + k4x[k]);
      c.L[k] += h / 6.0 * (k1l[k] + 2.0 * k2l[k] + 2.0 * k3l[k] + k4l[k]);
    }
    s += h;
    if (!ordered(c.X)) return s;
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(c.L[k]) || c.L[k] < floor_log) return s;
    }
  }
  return std::nullopt;
}

}  // namespace

Field characteristics_oracle(const Field& rho_ini, const TurningModel& model, double t,
                             const CharacteristicsOptions& options) {
  require_finite(rho_ini, "characteristics_oracle");
  if (!(t >= 0.0)) throw std::invalid_argument("characteristics_oracle: t must be >= 0");
  if (t == 0.0) return rho_ini;
  Cloud c = seed(rho_ini, options.labels);
  if (auto broke = integrate(c, model, t, options)) throw CharacteristicsBreakdown(*broke);

  const Grid& g = rho_ini.grid();
  Field out(g);
  const std::size_t n = c.X.size();
  std::size_t k = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.center(i);
    if (x < c.X.front() || x > c.X.back()) continue;
    while (k + 2 < n && c.X[k + 1] < x) ++k;
    const double r0 = c.rho0[k] * std::exp(-c.L[k]);
    const double r1 = c.rho0[k + 1] * std::exp(-c.L[k + 1]);
    const double th = (x - c.X[k]) / (c.X[k + 1] - c.X[k]);
    out[i] = (1.0 - th) * r0 + th * r1;
  }
  return out;
}

std::optional<double> characteristics_breakdown_time(const Field& rho_ini,
                                                     const TurningModel& model, double t_max,
                                                     const CharacteristicsOptions& options) {
  require_finite(rho_ini, "characteristics_breakdown_time");
  Cloud c = seed(rho_ini, options.labels);
  return integrate(c, model, t_max, options);
}

}  // namespace chemokin
