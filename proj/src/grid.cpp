#include "chemokin/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace chemokin {

Grid::Grid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n), dx_(0.0), mid_(0.5 * (x_min + x_max)) {
  if (n < 2) throw std::invalid_argument("Grid: need at least 2 cells");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw std::invalid_argument("Grid: require finite x_min < x_max");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n);
}

std::size_t Grid::cell_of(double x) const {
  const double s = std::floor((x - x_min_) / dx_);
  if (!(s > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(s), n_ - 1);
}

std::vector<double> Grid::centers() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = center(i);
  return xs;
}

Field::Field(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("Field: value count does not match grid");
  }
  require_finite(*this, "Field");
}

double Field::mass() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * grid_.dx();
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::l1() const {
  double s = 0.0;
  for (double v : values_) s += std::abs(v);
  return s * grid_.dx();
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

namespace {

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("Field: grid mismatch");
}

}  // namespace

Field& Field::operator+=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void require_finite(const Field& f, const char* what) {
  if (!f.all_finite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

}  // namespace chemokin
