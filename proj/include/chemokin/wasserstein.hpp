#pragma once

#include <vector>

#include "chemokin/grid.hpp"
#include "chemokin/particles.hpp"

namespace chemokin {

// Cumulative distribution of a nonnegative measure on the line. Knots carry a
// left and a right limit; between knots the CDF is linear from the right
// value of one knot to the left value of the next (constant for atoms,
// linear across a cell of a density).
class Cdf {
 public:
  // Densities are treated as constant per cell.
  static Cdf of(const Field& rho);
  static Cdf of(const ParticleMeasure& mu);

  double total() const { return right_.empty() ? 0.0 : right_.back(); }
  const std::vector<double>& knots() const { return x_; }
  // F(x+) and F(x-).
  double right(double x) const;
  double left(double x) const;
  void scale(double s);

 private:
  std::vector<double> x_, left_, right_;
};

// Integral of |F - G| over the line, exact for piecewise-linear CDFs.
double l1_between(const Cdf& F, const Cdf& G);

// Wasserstein-1 distance. Masses are expected to match; a relative mismatch
// above 1e-9 triggers a warning, and the second argument is always rescaled
// to the mass of the first. Zero mass throws std::invalid_argument.
double w1_distance(const Field& mu, const Field& nu);
double w1_distance(const Field& mu, const ParticleMeasure& nu);
double w1_distance(const ParticleMeasure& mu, const Field& nu);
double w1_distance(const ParticleMeasure& mu, const ParticleMeasure& nu);

}  // namespace chemokin
