#include "doctest.h"

#include <cmath>
#include <random>
#include <string>

#include "chemokin/elliptic.hpp"
#include "chemokin/log.hpp"
#include "oracles.hpp"

using namespace chemokin;

namespace {

Field spike(const Grid& g, std::size_t cell, double mass = 1.0) {
  Field rho(g);
  rho[cell] = mass / g.dx();
  return rho;
}

Field gaussian(const Grid& g, double x0, double sigma, double mass) {
  const double k = mass / (sigma * std::sqrt(2 * M_PI));
  return Field::sample(g, [&](double x) { return k * std::exp(-0.5 * (x - x0) * (x - x0) / (sigma * sigma)); });
}

double max_diff(const Field& a, const Field& b) { return (a - b).max_abs(); }

// Cells of the domain farther than `gap` from x0.
template <class F>
double max_err_away(const Field& f, F exact, double x0, double gap) {
  double e = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.grid().center(i);
    if (std::abs(x - x0) > gap) e = std::max(e, std::abs(f[i] - exact(x)));
  }
  return e;
}

}  // namespace

TEST_CASE("convolution matches the direct double sum") {
  const Grid g(-3.0, 5.0, 400);
  auto gen = oracle::rng();
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> v(g.size());
  for (double& x : v) x = u(gen);
  const Field rho(g, v);
  const auto p = solve_potential(rho);

  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rho[i] * g.dx();
  const auto [S, dS] = oracle::direct_sums(g.centers(), w, g.centers());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(p.S[i] - S[i]) <= 1e-12 * std::abs(S[i]));
    CHECK(std::abs(p.dS[i] - dS[i]) <= 1e-12 * p.S.max_abs());
  }
}

TEST_CASE("unit spike reproduces the kernel") {
  const Grid g(-10.0, 10.0, 2000);
  const Field rho = spike(g, 1000);
  const Field S = solve_conv(rho);
  const Field dS = grad_S(rho);
  const double dx = g.dx();
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(S[i] - 0.5 * std::exp(-std::abs(g.center(i)))));
  }
  CHECK(err <= 2 * dx);
  const double x0 = g.center(1000);
  CHECK(dS[1000] == 0.0);
  const double e =
      max_err_away(dS, [&](double x) { return (x > x0 ? -0.5 : 0.5) * std::exp(-std::abs(x - x0)); }, x0, 0.5 * dx);
  CHECK(e < 1e-14);
  CHECK(max_diff(S, solve_fem(rho)) <= 5 * dx * dx);
}

TEST_CASE("zero density gives zero potential") {
  const Grid g(-1.0, 1.0, 50);
  const Field rho(g);
  CHECK(solve_conv(rho).max_abs() == 0.0);
  CHECK(grad_S(rho).max_abs() == 0.0);
  CHECK(solve_fem(rho).max_abs() == 0.0);
}

TEST_CASE("exponential density against its closed-form potential") {
  // The exact solution S = (1 + |x|) e^{-|x|} / 2 satisfies -S'' + S = e^{-|x|}:
  // confirm that first by differencing it away from the kink.
  auto exact = [](double x) { return 0.5 * (1 + std::abs(x)) * std::exp(-std::abs(x)); };
  for (double x : {-3.0, -0.7, 0.4, 2.2}) {
    const double h = 1e-4;
    const double d2 = (exact(x + h) - 2 * exact(x) + exact(x - h)) / (h * h);
    CHECK(std::abs(-d2 + exact(x) - std::exp(-std::abs(x))) < 1e-6);
  }
  double prev = 0.0;
  for (std::size_t n : {1000u, 2000u, 4000u}) {
    const Grid g(-30.0, 30.0, n);
    const Field rho = Field::sample(g, [](double x) { return std::exp(-std::abs(x)); });
    const Field S = solve_conv(rho);
    const double err = max_diff(S, Field::sample(g, exact));
    CHECK(err < g.dx() * g.dx());
    if (prev > 0.0) CHECK(prev / err > 3.5);
    prev = err;
    CHECK(max_diff(S, solve_fem(rho)) < 5 * g.dx() * g.dx());
  }
}

TEST_CASE("finite elements agree with the convolution on smooth data") {
  for (std::size_t n : {500u, 1000u, 2000u}) {
    const Grid g(-10.0, 10.0, n);
    const Field rho = gaussian(g, 0.3, 0.5, 2.0);
    CHECK(max_diff(solve_conv(rho), solve_fem(rho)) <= 5 * g.dx() * g.dx());
  }
}

TEST_CASE("plateau density gives S close to its level") {
  const Grid g(-40.0, 40.0, 4000);
  const double c0 = 1.7;
  const Field rho = Field::sample(g, [&](double x) { return std::abs(x) < 25.0 ? c0 : 0.0; });
  CHECK(std::abs(solve_fem(rho)[2000] - c0) < 1e-6);
  // The cell sum of the kernel is 1 + dx^2/12.
  CHECK(std::abs(solve_conv(rho)[2000] - c0) < c0 * g.dx() * g.dx() / 10);
}

TEST_CASE("gradient of a symmetric density vanishes at the center") {
  const Grid g(-5.0, 5.0, 501);
  const Field rho = Field::sample(g, [](double x) { return std::exp(-x * x) * (1 + x * x); });
  CHECK(grad_S(rho)[250] == 0.0);
}

TEST_CASE("discrete consistency of S and dS") {
  const Grid g(-10.0, 10.0, 2000);
  const Field rho = gaussian(g, -0.4, 0.6, 1.5);
  const auto p = solve_potential(rho);
  const double dx = g.dx();
  double res = 0.0, grad = 0.0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double d2 = (p.S[i + 1] - 2 * p.S[i] + p.S[i - 1]) / (dx * dx);
    res = std::max(res, std::abs(-d2 + p.S[i] - rho[i]));
    grad = std::max(grad, std::abs((p.S[i + 1] - p.S[i - 1]) / (2 * dx) - p.dS[i]));
  }
  CHECK(res < 5 * dx * dx * rho.max());
  CHECK(grad < 5 * dx * dx * rho.max());
}

TEST_CASE("potential bounds by half the mass") {
  auto gen = oracle::rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Grid g(-4.0, 4.0, 200);
    std::vector<double> v(g.size());
    for (double& x : v) x = u(gen) < 0.2 ? 50.0 * u(gen) : 0.0;
    const Field rho(g, v);
    const auto p = solve_potential(rho);
    const double half = 0.5 * rho.mass();
    CHECK(p.S.max_abs() <= half * (1 + 1e-14));
    CHECK(p.dS.max_abs() <= half * (1 + 1e-14));
  }
}

TEST_CASE("kernel sums on scattered atoms") {
  auto gen = oracle::rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::vector<double> src(40), w(40), tgt(300);
  for (auto& x : src) x = u(gen);
  for (auto& x : w) x = 0.1 + std::abs(u(gen));
  for (auto& x : tgt) x = u(gen);
  std::sort(src.begin(), src.end());
  std::sort(tgt.begin(), tgt.end());
  src[5] = src[4];  // coincident sources
  tgt[7] = src[10];  // target on a source
  std::sort(tgt.begin(), tgt.end());
  std::vector<double> S(tgt.size()), dS(tgt.size());
  kernel_sums(src, w, tgt, S, dS);
  const auto [So, dSo] = oracle::direct_sums(src, w, tgt);
  for (std::size_t k = 0; k < tgt.size(); ++k) {
    CHECK(std::abs(S[k] - So[k]) < 1e-13);
    CHECK(std::abs(dS[k] - dSo[k]) < 1e-13);
  }
}

TEST_CASE("non-finite densities are rejected and boundary mass warns") {
  const Grid g(-1.0, 1.0, 20);
  CHECK_THROWS_AS(Field(g, std::vector<double>(20, NAN)), std::invalid_argument);
  Field rho(g);
  rho[1] = 1.0;
  std::string seen;
  auto prev = set_warning_handler([&](const std::string& m) { seen = m; });
  (void)solve_fem(rho);
  set_warning_handler(prev);
  CHECK(seen.find("boundary") != std::string::npos);
  CHECK(boundary_mass(rho) == doctest::Approx(g.dx()));
}
