#include "chemokin/elliptic.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chemokin/log.hpp"

namespace chemokin {

double ExponentialKernel::value(double x) { return 0.5 * std::exp(-std::abs(x)); }

double ExponentialKernel::derivative(double x) {
  if (x == 0.0) return 0.0;
  return (x > 0.0 ? -0.5 : 0.5) * std::exp(-std::abs(x));
}

namespace {

// Left and right exponentially damped partial sums of w_j = rho_j dx / 2,
// excluding the cell itself.
void prefix_sums(const Field& rho, std::vector<double>& left, std::vector<double>& right,
                 std::vector<double>& w) {
  require_finite(rho, "elliptic solve");
  const std::size_t n = rho.size();
  const double dx = rho.grid().dx();
  const double decay = std::exp(-dx);
  w.resize(n);
  left.assign(n, 0.0);
  right.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * rho[i] * dx;
  for (std::size_t i = 1; i < n; ++i) left[i] = decay * (left[i - 1] + w[i - 1]);
  for (std::size_t i = n - 1; i-- > 0;) right[i] = decay * (right[i + 1] + w[i + 1]);
}

}  // namespace

Potential solve_potential(const Field& rho) {
  std::vector<double> left, right, w;
  prefix_sums(rho, left, right, w);
  Field S(rho.grid());
  Field dS(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    S[i] = left[i] + right[i] + w[i];
    dS[i] = right[i] - left[i];
  }
  return {std::move(S), std::move(dS)};
}

Field solve_conv(const Field& rho) { return solve_potential(rho).S; }

Field grad_S(const Field& rho) { return solve_potential(rho).dS; }

Field solve_fem(const Field& rho) {
  require_finite(rho, "solve_fem");
  const std::size_t n = rho.size();
  const double dx = rho.grid().dx();
  if (boundary_mass(rho) > 1e-10 * std::max(std::abs(rho.mass()), 1e-300)) {
    warn("solve_fem: density carries mass within 5 cells of the boundary");
  }

  // Stiffness + consistent mass, Robin terms on the end diagonals; the load
  // is the cell mass rho_i dx.
  std::vector<double> diag(n), off(n - 1, -1.0 / dx + dx / 6.0), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 2.0 / dx + 4.0 * dx / 6.0;
    rhs[i] = rho[i] * dx;
  }
  diag[0] = 1.0 / dx + 2.0 * dx / 6.0 + 1.0;
  diag[n - 1] = 1.0 / dx + 2.0 * dx / 6.0 + 1.0;

  // Thomas algorithm; the matrix is symmetric positive definite.
  std::vector<double> c(n - 1);
  c[0] = off[0] / diag[0];
  rhs[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - off[i - 1] * c[i - 1];
    assert(m > 0.0);
    if (i < n - 1) c[i] = off[i] / m;
    rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return Field(rho.grid(), std::move(rhs));
}

void kernel_sums(std::span<const double> source_x, std::span<const double> source_w,
                 std::span<const double> target_x, std::span<double> S_out,
                 std::span<double> dS_out) {
  const std::size_t ns = source_x.size();
  const std::size_t nt = target_x.size();
  if (source_w.size() != ns || S_out.size() != nt || dS_out.size() != nt) {
    throw std::invalid_argument("kernel_sums: size mismatch");
  }
  std::vector<double> left(nt, 0.0), right(nt, 0.0), self(nt, 0.0);

  // Sweep right: acc = sum over sources strictly left of x of w e^{-(x - x_j)}.
  {
    double acc = 0.0;
    double pos = 0.0;
    bool started = false;
    std::size_t j = 0;
    for (std::size_t k = 0; k < nt; ++k) {
      const double x = target_x[k];
      while (j < ns && source_x[j] < x) {
        if (started) acc *= std::exp(-(source_x[j] - pos));
        pos = source_x[j];
        started = true;
        acc += source_w[j];
        ++j;
      }
      left[k] = started ? acc * std::exp(-(x - pos)) : 0.0;
      std::size_t jj = j;
      while (jj < ns && source_x[jj] == x) self[k] += source_w[jj++];
    }
  }
  // Sweep left: sources strictly right of x.
  {
    double acc = 0.0;
    double pos = 0.0;
    bool started = false;
    std::size_t j = ns;
    for (std::size_t k = nt; k-- > 0;) {
      const double x = target_x[k];
      while (j > 0 && source_x[j - 1] > x) {
        --j;
        if (started) acc *= std::exp(-(pos - source_x[j]));
        pos = source_x[j];
        started = true;
        acc += source_w[j];
      }
      right[k] = started ? acc * std::exp(-(pos - x)) : 0.0;
    }
  }
  for (std::size_t k = 0; k < nt; ++k) {
    S_out[k] = 0.5 * (left[k] + right[k] + self[k]);
    dS_out[k] = 0.5 * (right[k] - left[k]);
  }
}

double boundary_mass(const Field& rho, std::size_t cells) {
  const std::size_t n = rho.size();
  const std::size_t k = std::min(cells, n / 2);
  double m = 0.0;
  for (std::size_t i = 0; i < k; ++i) m += std::abs(rho[i]) + std::abs(rho[n - 1 - i]);
  return m * rho.grid().dx();
}

}  // namespace chemokin
