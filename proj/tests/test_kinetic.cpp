#include "doctest.h"

#include <cmath>
#include <random>

#include "chemokin/elliptic.hpp"
#include "chemokin/kinetic.hpp"
#include "oracles.hpp"

using namespace chemokin;

namespace {

Field gaussian(const Grid& g, double x0, double sigma, double mass) {
  const double k = mass / (sigma * std::sqrt(2 * M_PI));
  return Field::sample(g, [&](double x) { return k * std::exp(-0.5 * (x - x0) * (x - x0) / (sigma * sigma)); });
}

Field constant(const Grid& g, double v) { return Field::sample(g, [&](double) { return v; }); }

// Gain-loss form of the turning operator, integrated by RK4 in small steps.
std::pair<double, double> relax_oracle(double fp, double fm, double dS, double eps, double T,
                                       const TurningModel& m) {
  const double c = m.c();
  const double gain_p = m.phi(-c * dS);  // rate f- -> f+
  const double gain_m = m.phi(c * dS);   // rate f+ -> f-
  const int n = 20000;
  const double h = T / n;
  auto rhs = [&](double p, double q) {
    return std::pair{(gain_p * q - gain_m * p) / eps, (gain_m * p - gain_p * q) / eps};
  };
  for (int k = 0; k < n; ++k) {
    auto [a1, b1] = rhs(fp, fm);
    auto [a2, b2] = rhs(fp + 0.5 * h * a1, fm + 0.5 * h * b1);
    auto [a3, b3] = rhs(fp + 0.5 * h * a2, fm + 0.5 * h * b2);
    auto [a4, b4] = rhs(fp + h * a3, fm + h * b3);
    fp += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    fm += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
  }
  return {fp, fm};
}

}  // namespace

TEST_CASE("local equilibrium") {
  const TurningModel m;
  const Grid g(0.0, 1.0, 10);
  const Field rho = Field::sample(g, [](double x) { return 1 + x; });

  const KineticState flat = equilibrium(rho, Field(g), m);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(flat.f_plus[i] == doctest::Approx(0.5 * rho[i]).epsilon(1e-15));
    CHECK(flat.f_minus[i] == flat.f_plus[i]);
  }

  // Saturated gradient: phi takes the values phi0/4 and phi0.
  const KineticState sat = equilibrium(rho, constant(g, 1.5), m);
  const Field J = sat.flux(m.c());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(sat.f_plus[i] == doctest::Approx(0.8 * rho[i]).epsilon(1e-15));
    CHECK(sat.f_minus[i] == doctest::Approx(0.2 * rho[i]).epsilon(1e-15));
    CHECK(J[i] == doctest::Approx(0.6 * rho[i]).epsilon(1e-14));
    CHECK(J[i] == doctest::Approx(m.velocity(1.5) * rho[i]).epsilon(1e-14));
  }

  auto gen = oracle::rng();
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const TurningModel m2(TurningParams{3.0, 0.4, 2.0});
  Field dS(g);
  for (std::size_t i = 0; i < g.size(); ++i) dS[i] = u(gen);
  const KineticState eq = equilibrium(rho, dS, m2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(eq.f_plus[i] + eq.f_minus[i] - rho[i]) <= 1e-15 * rho[i]);
  }
}

TEST_CASE("transport is an exact shift") {
  const TurningModel m(TurningParams{1.0, 1.0, 2.0});
  const Grid g(0.0, 1.0, 20);
  KineticState s{Field(g), Field(g), 0.0};
  s.f_plus[4] = 1.0;
  s.f_minus[9] = 2.0;
  const TransportResult r = transport_step(s, m);
  CHECK(r.state.f_plus[5] == 1.0);
  CHECK(r.state.f_minus[8] == 2.0);
  CHECK(r.state.mass() == s.mass());
  CHECK(r.state.t == doctest::Approx(g.dx() / 2.0));
  CHECK(r.outflow == 0.0);

  KineticState edge{Field(g), Field(g), 0.0};
  edge.f_plus[19] = 1.0;
  edge.f_minus[0] = 1.0;
  const TransportResult out = transport_step(edge, m);
  CHECK(out.state.mass() == 0.0);
  CHECK(out.outflow == doctest::Approx(2 * g.dx()));
}

TEST_CASE("periodic transport: constants are fixed, profiles return exactly") {
  const TurningModel m;
  const Grid g(-1.0, 1.0, 64);
  const KineticState c{constant(g, 0.3), constant(g, 0.7), 0.0};
  const TransportResult r = transport_step(c, m, Boundary::periodic);
  CHECK((r.state.f_plus - c.f_plus).max_abs() == 0.0);
  CHECK((r.state.f_minus - c.f_minus).max_abs() == 0.0);

  const Field p = gaussian(g, 0.2, 0.1, 1.0);
  KineticState s{p, 0.5 * p, 0.0};
  const double first = s.f_plus.mass() + s.f_minus.mass();
  const double v1 = s.flux(m.c()).mass();
  for (std::size_t k = 0; k < g.size(); ++k) {
    s = transport_step(s, m, Boundary::periodic).state;
    CHECK(std::abs(s.mass() - first) < 1e-12);
    CHECK(std::abs(s.flux(m.c()).mass() - v1) < 1e-12);
  }
  CHECK((s.f_plus - p).max_abs() <= 1e-12);
  CHECK((s.f_minus - 0.5 * p).max_abs() <= 1e-12);
}

TEST_CASE("collision step") {
  const TurningModel m(TurningParams{2.0, 1.0, 1.0});
  const Grid g(0.0, 1.0, 8);
  auto gen = oracle::rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  KineticState s{Field(g), Field(g), 0.0};
  Field dS(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.f_plus[i] = u(gen);
    s.f_minus[i] = u(gen);
    dS[i] = 2.0 * u(gen) - 1.0;
  }
  const Field rho = s.density();

  const KineticState same = collision_step(s, 0.1, 0.0, dS, m);
  CHECK((same.f_plus - s.f_plus).max_abs() == 0.0);

  const KineticState full = collision_step(s, 1e-3, 10.0, dS, m);
  const KineticState eq = equilibrium(rho, dS, m);
  CHECK((full.f_plus - eq.f_plus).max_abs() < 1e-15);
  CHECK((full.f_minus - eq.f_minus).max_abs() < 1e-15);

  const double eps = 0.05, dt = 0.03;
  const KineticState r = collision_step(s, eps, dt, dS, m);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(r.f_plus[i] + r.f_minus[i] == doctest::Approx(rho[i]).epsilon(1e-15));
    const auto [fp, fm] = relax_oracle(s.f_plus[i], s.f_minus[i], dS[i], eps, dt, m);
    CHECK(std::abs(r.f_plus[i] - fp) < 1e-12);
    CHECK(std::abs(r.f_minus[i] - fm) < 1e-12);
  }

  // log residual decays with slope -(5/4) phi0 / eps.
  KineticState z = s;
  const double r0 = (z.f_plus - eq.f_plus).max_abs();
  for (int k = 0; k < 10; ++k) z = collision_step(z, eps, 0.01, dS, m);
  const double r1 = (z.f_plus - eq.f_plus).max_abs();
  const double slope = std::log(r1 / r0) / 0.1;
  CHECK(slope == doctest::Approx(-1.25 * m.phi0() / eps).epsilon(1e-6));

  CHECK_THROWS_AS(collision_step(s, 0.0, 0.1, dS, m), std::invalid_argument);
}

TEST_CASE("mollifier preserves mass and positivity") {
  const Grid g(-2.0, 2.0, 400);
  Field rho(g);
  rho[200] = 1.0 / g.dx();
  rho[50] = 3.0 / g.dx();
  for (double sigma : {0.005, 0.03, 0.2}) {
    const Field m = mollify(rho, sigma);
    CHECK(m.mass() == doctest::Approx(rho.mass()).epsilon(1e-14));
    CHECK(m.min() >= 0.0);
    CHECK(m.max() < rho.max());
  }
  const ParticleMeasure mu({{0.1, 0.5}, {-0.7, 1.5}});
  CHECK(mollify(mu, g, 0.05).mass() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mollifier_width(1e-4, 0.01) == 0.02);
  CHECK(mollifier_width(0.04, 0.01) == 0.04);
}

TEST_CASE("probe times map to steps") {
  const std::vector<double> probes{0.0, 0.25, 1.0};
  const auto s = probe_steps(probes, 0.01, 1.0);
  CHECK(s == std::vector<std::size_t>{0, 25, 100});
  const std::vector<double> bad{1.5};
  CHECK_THROWS_AS(probe_steps(bad, 0.01, 1.0), std::invalid_argument);
}

TEST_CASE("zero data stays zero") {
  const Grid g(-1.0, 1.0, 100);
  KineticParams p;
  p.t_end = 0.5;
  const std::vector<double> probes{0.0, 0.5};
  const KineticRun run = run_kinetic(Field(g), p, probes);
  REQUIRE(run.snapshots.size() == 2);
  for (const auto& s : run.snapshots) {
    CHECK(s.state.mass() == 0.0);
    CHECK(s.S.max_abs() == 0.0);
  }
}

TEST_CASE("kinetic run: conservation, positivity and the flux bound") {
  const Grid g(-3.0, 3.0, 600);
  const Field rho = gaussian(g, 0.1, 0.25, 2.0);
  KineticParams p;
  p.eps = 0.02;
  p.t_end = 2.0;
  const std::vector<double> probes{0.5, 1.0, 2.0};
  const KineticRun run = run_kinetic(rho, p, probes);
  CHECK(run.steps == 200);
  CHECK(run.outflow < 1e-14);
  for (const auto& s : run.snapshots) {
    CHECK(std::abs(s.state.mass() - run.initial_mass) <= 1e-12 * run.initial_mass);
    CHECK(s.state.f_plus.min() >= -1e-12);
    CHECK(s.state.f_minus.min() >= -1e-12);
    const Field r = s.state.density();
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(s.J[i]) <= p.model.c() * r[i] + 1e-12);
  }
}

TEST_CASE("smaller eps aggregates faster and relaxes the flux") {
  const Grid g(-2.0, 2.0, 400);
  const Field rho = gaussian(g, 0.0, 0.2, 4.0);
  const std::vector<double> probes{1.0};
  double prev_peak = 0.0, prev_gap = 1e300;
  for (double eps : {4e-2, 1e-2, 1e-3}) {
    KineticParams p;
    p.eps = eps;
    p.t_end = 1.0;
    const KineticRun run = run_kinetic(rho, p, probes);
    const auto& s = run.snapshots.back();
    const Field r = s.state.density();
    CHECK(r.max() > prev_peak);
    prev_peak = r.max();
    double gap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gap += std::abs(s.J[i] - p.model.velocity(s.dS[i]) * r[i]);
    gap *= g.dx();
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("density ceiling aborts the run") {
  const Grid g(-2.0, 2.0, 400);
  KineticParams p;
  p.eps = 1e-3;
  p.t_end = 5.0;
  p.rho_ceiling = 30.0;
  const std::vector<double> probes{0.0};
  const KineticRun run = run_kinetic(gaussian(g, 0.0, 0.2, 4.0), p, probes);
  CHECK(run.aborted);
  CHECK(run.steps < 500);
  CHECK(run.abort_reason.find("ceiling") != std::string::npos);
}
