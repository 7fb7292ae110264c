#include "chemokin/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chemokin/elliptic.hpp"

namespace chemokin {

ParticleMeasure::ParticleMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.x) || !std::isfinite(a.w) || !(a.w > 0.0)) {
      throw std::invalid_argument("ParticleMeasure: atoms need finite x and w > 0");
    }
  }
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& a, const Atom& b) { return a.x < b.x; });
}

ParticleMeasure ParticleMeasure::from_quantiles(const Field& rho, std::size_t n) {
  if (n == 0) throw std::invalid_argument("from_quantiles: need at least one atom");
  const Grid& g = rho.grid();
  const double dx = g.dx();
  std::vector<double> cum(rho.size() + 1, 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < 0.0) throw std::invalid_argument("from_quantiles: negative density");
    cum[i + 1] = cum[i] + rho[i] * dx;
  }
  const double total = cum.back();
  if (!(total > 0.0)) throw std::invalid_argument("from_quantiles: zero mass");

  std::vector<Atom> atoms;
  atoms.reserve(n);
  std::size_t cell = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = (static_cast<double>(k) + 0.5) * total / static_cast<double>(n);
    while (cell + 1 < rho.size() && cum[cell + 1] < target) ++cell;
    const double in_cell = cum[cell + 1] - cum[cell];
    const double frac = in_cell > 0.0 ? (target - cum[cell]) / in_cell : 0.5;
    atoms.push_back({g.edge(cell) + std::clamp(frac, 0.0, 1.0) * dx, total / static_cast<double>(n)});
  }
  return ParticleMeasure(std::move(atoms));
}

double ParticleMeasure::mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.w;
  return m;
}

double ParticleMeasure::center_of_mass() const {
  double m = 0.0, mx = 0.0;
  for (const Atom& a : atoms_) {
    m += a.w;
    mx += a.w * a.x;
  }
  return m > 0.0 ? mx / m : 0.0;
}

std::vector<double> ParticleMeasure::positions() const {
  std::vector<double> xs(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) xs[i] = atoms_[i].x;
  return xs;
}

std::vector<double> ParticleMeasure::weights() const {
  std::vector<double> ws(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) ws[i] = atoms_[i].w;
  return ws;
}

void ParticleMeasure::potential_at_atoms(std::span<double> S, std::span<double> dS) const {
  const auto xs = positions();
  const auto ws = weights();
  kernel_sums(xs, ws, xs, S, dS);
}

void ParticleMeasure::potential_on_grid(const Grid& grid, std::span<double> S,
                                        std::span<double> dS) const {
  const auto xs = positions();
  const auto ws = weights();
  const auto centers = grid.centers();
  kernel_sums(xs, ws, centers, S, dS);
}

Field ParticleMeasure::deposit(const Grid& grid) const {
  Field rho(grid);
  for (const Atom& a : atoms_) rho[grid.cell_of(a.x)] += a.w / grid.dx();
  return rho;
}

}  // namespace chemokin
