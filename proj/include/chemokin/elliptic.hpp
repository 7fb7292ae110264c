#pragma once

#include <span>

#include "chemokin/grid.hpp"

namespace chemokin {

// Green's function of -d^2/dx^2 + 1 on the line, K(x) = exp(-|x|)/2.
struct ExponentialKernel {
  static double value(double x);
  // Derivative with the principal value K'(0) = 0.
  static double derivative(double x);
  static constexpr double sup = 0.5;
  static constexpr double derivative_sup = 0.5;
};

struct Potential {
  Field S;
  Field dS;
};

// S = K * rho as a cell-centered sum, O(n) through two exponential prefix
// recursions. Non-finite input throws std::invalid_argument.
Field solve_conv(const Field& rho);

// P1 finite elements on the cell centers with Robin conditions S' = S at the
// left end and S' = -S at the right end, which are exact when rho vanishes
// outside the domain. Warns when rho carries mass within 5 cells of a boundary.
Field solve_fem(const Field& rho);

// dS/dx = K' * rho with a zero self-interaction term.
Field grad_S(const Field& rho);

// S and dS/dx in one pass.
Potential solve_potential(const Field& rho);

// S and dS/dx at sorted target points generated by weighted atoms at sorted
// source positions. A target coinciding with a source picks up K(0) w in S and
// nothing in dS. O(sources + targets).
void kernel_sums(std::span<const double> source_x, std::span<const double> source_w,
                 std::span<const double> target_x, std::span<double> S_out,
                 std::span<double> dS_out);

// Mass of rho within `cells` cells of either boundary.
double boundary_mass(const Field& rho, std::size_t cells = 5);

}  // namespace chemokin
