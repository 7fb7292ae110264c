#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chemokin/grid.hpp"

namespace chemokin {

struct Atom {
  double x;
  double w;
};

// Nonnegative measure sum_i w_i delta_{x_i}; atoms kept sorted by position.
class ParticleMeasure {
 public:
  ParticleMeasure() = default;
  /// Sorts by position. Throws std::invalid_argument on non-positive or
  /// non-finite weights or positions.
  explicit ParticleMeasure(std::vector<Atom> atoms);

  // n equal-mass atoms at the mass quantiles (k + 1/2) M / n of a density,
  // whose CDF is piecewise linear across each cell.
  static ParticleMeasure from_quantiles(const Field& rho, std::size_t n);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  double mass() const;
  double center_of_mass() const;

  std::vector<double> positions() const;
  std::vector<double> weights() const;

  // S and dS/dx of K * mu at the atoms (self-term of dS is zero).
  void potential_at_atoms(std::span<double> S, std::span<double> dS) const;
  // S and dS/dx of K * mu at the cell centers of a grid.
  void potential_on_grid(const Grid& grid, std::span<double> S, std::span<double> dS) const;

  // Each atom's weight deposited into the cell containing it, as a density.
  Field deposit(const Grid& grid) const;

 private:
  std::vector<Atom> atoms_;
};

}  // namespace chemokin
