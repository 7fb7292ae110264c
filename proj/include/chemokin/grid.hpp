#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chemokin {

// Uniform cell-centered mesh of [x_min, x_max].
class Grid {
 public:
  /// Throws std::invalid_argument if n < 2 or the interval is empty/non-finite.
  Grid(double x_min, double x_max, std::size_t n);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double length() const { return x_max_ - x_min_; }

  // Measured from the midpoint so that a domain symmetric about 0 has
  // centers that are exact negatives of each other.
  double center(std::size_t i) const {
    return mid_ + (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(n_)) * dx_;
  }
  // Left edge of cell i; edge(0) == x_min and edge(n) == x_max.
  double edge(std::size_t i) const {
    if (i == 0) return x_min_;
    if (i == n_) return x_max_;
    return mid_ + (static_cast<double>(i) - 0.5 * static_cast<double>(n_)) * dx_;
  }
  // Index of the cell containing x, clamped to [0, n-1].
  std::size_t cell_of(double x) const;

  std::vector<double> centers() const;

  bool operator==(const Grid& other) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
  double mid_;
};

// Cell-centered samples of a density or potential on a Grid. A density's
// mass is sum(values) * dx.
class Field {
 public:
  explicit Field(Grid grid);
  /// Throws std::invalid_argument on size mismatch or non-finite values.
  Field(Grid grid, std::vector<double> values);

  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.center(i));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double mass() const;
  double max() const;
  double min() const;
  double max_abs() const;
  // Sum |values| dx.
  double l1() const;
  bool all_finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Throws std::invalid_argument if any value is NaN or infinite.
void require_finite(const Field& f, const char* what);

}  // namespace chemokin
