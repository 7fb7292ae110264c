#include "doctest.h"

#include <cmath>
#include <random>

#include "chemokin/elliptic.hpp"
#include "chemokin/macro.hpp"
#include "chemokin/wasserstein.hpp"
#include "oracles.hpp"

using namespace chemokin;

namespace {

Field gaussian(const Grid& g, double x0, double sigma, double mass) {
  const double k = mass / (sigma * std::sqrt(2 * M_PI));
  return Field::sample(g, [&](double x) { return k * std::exp(-0.5 * (x - x0) * (x - x0) / (sigma * sigma)); });
}

// (1 - (x/delta)^2)^2 scaled to the given mass.
Field bump(const Grid& g, double delta, double mass) {
  const double k = 15.0 / (16.0 * delta) * mass;
  return Field::sample(g, [&](double x) {
    const double z = x / delta;
    return std::abs(z) < 1 ? k * (1 - z * z) * (1 - z * z) : 0.0;
  });
}

double center_of_mass(const Field& rho) {
  double m = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    m += rho[i];
    mx += rho[i] * rho.grid().center(i);
  }
  return mx / m;
}

}  // namespace

TEST_CASE("upwind with a frozen constant velocity translates the profile") {
  const Grid g(-2.0, 4.0, 600);
  const Field rho = gaussian(g, 0.0, 0.2, 1.0);
  const std::vector<double> u(g.size() + 1, 0.4);
  const double dt = 0.01;
  Field r = rho;
  for (int k = 0; k < 250; ++k) r = upwind_advect(r, u, dt).rho;
  CHECK(center_of_mass(r) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.max() < rho.max());  // first-order smearing
}

TEST_CASE("upwind step: symmetry, conservation, CFL") {
  const TurningModel m;
  const Grid g(-3.0, 3.0, 300);
  const Field rho = gaussian(g, 0.0, 0.4, 3.0);
  MacroParams p;
  p.model = m;
  p.dt = max_stable_dt(g, m, 0.5);
  Field r = rho;
  for (int k = 0; k < 200; ++k) {
    const UpwindResult s = upwind_step(r, p);
    CHECK(std::abs(s.rho.mass() - r.mass()) <= 1e-12 * r.mass());
    r = s.rho;
  }
  CHECK(r.min() >= 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r[i] == r[g.size() - 1 - i]);
  CHECK(std::abs(center_of_mass(r)) < 1e-13);
  CHECK(r.max() > rho.max());

  p.dt = 2.0 * max_stable_dt(g, m, p.cfl);
  try {
    (void)upwind_step(rho, p);
    FAIL("expected a CFL violation");
  } catch (const CflViolation& e) {
    CHECK(e.required_dt() == doctest::Approx(0.5 * g.dx() / 0.6));
  }
}

TEST_CASE("L-infinity bound curve") {
  const TurningModel m;
  const double r0 = 2.0;
  const double T = linf_bound_horizon(r0, m);
  CHECK(T == doctest::Approx(1.0 / (2 * 1.125 * 2.0)));
  CHECK(*linf_bound_curve(r0, m, 0.0) == r0);
  CHECK(*linf_bound_curve(r0, m, 0.5 * T) == doctest::Approx(2 * r0).epsilon(1e-14));
  double prev = r0;
  for (int k = 1; k < 100; ++k) {
    const double v = *linf_bound_curve(r0, m, T * k / 100.0);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 99 * r0);
  CHECK_FALSE(linf_bound_curve(r0, m, T).has_value());
  CHECK_FALSE(linf_bound_curve(r0, m, 2 * T).has_value());
}

TEST_CASE("grid solution stays below the L-infinity bound and inside the support") {
  const TurningModel m;
  const Grid g(-1.5, 1.5, 600);
  const Field rho = bump(g, 0.5, 1.0);
  const double T = linf_bound_horizon(rho.max(), m);
  MacroParams p;
  p.model = m;
  p.dt = max_stable_dt(g, m, 0.5);
  p.t_end = 0.95 * T;
  std::vector<double> probes;
  for (int k = 1; k <= 19; ++k) probes.push_back(p.t_end * k / 19.0);
  const MacroGridRun run = run_macro_grid(rho, p, probes);
  for (const auto& s : run.snapshots) {
    CHECK(s.rho.max() <= *linf_bound_curve(rho.max(), m, s.t) * 1.1);
    double outside = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::abs(g.center(i)) > 0.5 + g.dx()) outside += s.rho[i] * g.dx();
    }
    CHECK(outside < 1e-12);
  }
}

TEST_CASE("characteristics oracle") {
  const TurningModel m;
  const Grid g(-2.0, 2.0, 400);
  const Field rho = gaussian(g, 0.0, 0.3, 1.0);
  CHECK((characteristics_oracle(rho, m, 0.0) - rho).max_abs() == 0.0);

  // Mutual convergence with the upwind scheme: the gap shrinks ~ dx.
  const double t = 0.3;
  double prev = 0.0;
  for (std::size_t n : {200u, 400u, 800u}) {
    const Grid gn(-2.0, 2.0, n);
    const Field r0 = gaussian(gn, 0.0, 0.3, 1.0);
    MacroParams p;
    p.model = m;
    p.dt = max_stable_dt(gn, m, 0.5);
    p.t_end = t;
    const std::vector<double> probes{t};
    const Field up = run_macro_grid(r0, p, probes).snapshots.back().rho;
    const Field ch = characteristics_oracle(r0, m, t, {2000, 1e-3, 1e-6});
    const double gap = (up - ch).l1();
    MESSAGE("gap " << gap);
    CHECK(gap < 10 * gn.dx());
    if (prev > 0.0) CHECK(prev / gap > 1.6);
    prev = gap;
  }
}

TEST_CASE("characteristics cross within the horizon bracket for concentrated data") {
  const TurningModel m;
  const Grid g(-1.0, 1.0, 800);
  const Field rho = bump(g, 0.5, 1.0);
  const double Th = linf_bound_horizon(rho.max(), m);
  const auto tb = characteristics_breakdown_time(rho, m, 10.0 * Th, {1000, 1e-3, 1e-6});
  REQUIRE(tb.has_value());
  CHECK(*tb >= Th);
  CHECK(*tb <= 5.0 * Th);
  CHECK_THROWS_AS(characteristics_oracle(rho, m, 10.0 * Th), CharacteristicsBreakdown);
}

TEST_CASE("single atom is stationary") {
  MacroParams p;
  p.dt = 0.1;
  for (double x : {-3.0, 0.0, 7.5}) {
    const ParticleMeasure mu({{x, 2.0}});
    const ParticleStepResult r = particle_step(mu, p);
    CHECK(r.measure[0].x == x);
    CHECK(r.merges.empty());
  }
}

TEST_CASE("two symmetric atoms collapse onto the origin on the oracle schedule") {
  const TurningModel m;
  const double d0 = 0.8, w = 1.0;
  // Half-distance ODE d' = -a(w e^{-2d} / 2), by RK4 with a fine step.
  auto rhs = [&](double d) { return -m.velocity(0.5 * w * std::exp(-2 * d)); };
  double d = d0, t_meet = 0.0;
  const double h = 1e-5;
  while (d > 0.0) {
    const double next = oracle::rk4(rhs, d, h);
    if (next <= 0.0) {
      t_meet += h * d / (d - next);
      break;
    }
    d = next;
    t_meet += h;
  }

  MacroParams p;
  p.model = m;
  p.dt = 1e-3;
  p.t_end = 2 * t_meet;
  const std::vector<double> probes{0.5 * t_meet, p.t_end};
  const ParticleRun run = run_macro_particles(ParticleMeasure({{-d0, w}, {d0, w}}), p, probes);
  REQUIRE(run.merges.size() == 1);
  CHECK(run.merges[0].x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(run.merges[0].x) < 1e-12);
  CHECK(run.merges[0].w == 2 * w);
  CHECK(run.merges[0].atoms == 2);
  CHECK(std::abs(run.merges[0].t - t_meet) < 2 * p.dt);

  // Half way: position against the oracle.
  double dh = d0;
  for (int k = 0; k < static_cast<int>(std::round(0.5 * t_meet / h)); ++k) dh = oracle::rk4(rhs, dh, h);
  CHECK(run.snapshots[0].measure[1].x == doctest::Approx(dh).epsilon(1e-4));
  CHECK(run.snapshots[1].measure.size() == 1);
  CHECK(run.snapshots[1].measure[0].w == 2 * w);
}

TEST_CASE("particle properties under random data") {
  const TurningModel m(TurningParams{1.0, 0.5, 1.0});
  auto gen = oracle::rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> uw(0.05, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Atom> atoms(30);
    for (auto& a : atoms) a = {u(gen), uw(gen)};
    ParticleMeasure mu(atoms);
    const double M = mu.mass();
    MacroParams p;
    p.model = m;
    p.dt = 0.02;
    p.merge_tol = 1e-3;
    std::size_t count = mu.size();
    for (int k = 0; k < 100; ++k) {
      mu = particle_step(mu, p).measure;
      CHECK(mu.size() <= count);
      count = mu.size();
      for (std::size_t i = 1; i < mu.size(); ++i) CHECK(mu[i].x - mu[i - 1].x >= p.merge_tol);
    }
    CHECK(std::abs(mu.mass() - M) <= 1e-14 * M * 30);
  }
}

TEST_CASE("grid and particle solvers agree before blow-up") {
  const TurningModel m;
  const double t = 0.3;
  double prev = 0.0;
  for (std::size_t n : {200u, 400u, 800u}) {
    const Grid g(-2.0, 2.0, n);
    const Field r0 = gaussian(g, 0.0, 0.3, 1.0);
    MacroParams p;
    p.model = m;
    p.dt = max_stable_dt(g, m, 0.5);
    p.t_end = t;
    const std::vector<double> probes{t};
    const Field grid = run_macro_grid(r0, p, probes).snapshots.back().rho;
    const ParticleMeasure mu = ParticleMeasure::from_quantiles(r0, n);
    const ParticleMeasure pt = run_macro_particles(mu, p, probes).snapshots.back().measure;
    const double w1 = w1_distance(grid, pt);
    CHECK(w1 < g.dx());
    if (prev > 0.0) CHECK(prev / w1 > 1.6);
    prev = w1;
  }
}

TEST_CASE("quantile atoms") {
  const Grid g(0.0, 1.0, 100);
  const Field flat = Field::sample(g, [](double) { return 2.0; });
  const ParticleMeasure mu = ParticleMeasure::from_quantiles(flat, 4);
  REQUIRE(mu.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(mu[k].x == doctest::Approx((k + 0.5) / 4.0).epsilon(1e-12));
    CHECK(mu[k].w == doctest::Approx(0.5));
  }
}
