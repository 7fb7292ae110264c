#include "chemokin/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chemokin/log.hpp"

namespace chemokin {

Cdf Cdf::of(const Field& rho) {
  const Grid& g = rho.grid();
  Cdf F;
  F.x_.resize(rho.size() + 1);
  F.left_.resize(rho.size() + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i <= rho.size(); ++i) {
    F.x_[i] = g.edge(i);
    F.left_[i] = acc;
    if (i < rho.size()) {
      if (rho[i] < 0.0) throw std::invalid_argument("Cdf: negative density");
      acc += rho[i] * g.dx();
    }
  }
  F.right_ = F.left_;
  return F;
}

Cdf Cdf::of(const ParticleMeasure& mu) {
  Cdf F;
  double acc = 0.0;
  for (const Atom& a : mu.atoms()) {
    if (!F.x_.empty() && F.x_.back() == a.x) {
      acc += a.w;
      F.right_.back() = acc;
      continue;
    }
    F.x_.push_back(a.x);
    F.left_.push_back(acc);
    acc += a.w;
    F.right_.push_back(acc);
  }
  return F;
}

double Cdf::right(double x) const {
  if (x_.empty() || x < x_.front()) return 0.0;
  if (x >= x_.back()) return right_.back();
  const auto k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  if (x == x_[k]) return right_[k];
  const double th = (x - x_[k]) / (x_[k + 1] - x_[k]);
  return (1.0 - th) * right_[k] + th * left_[k + 1];
}

double Cdf::left(double x) const {
  if (x_.empty() || x <= x_.front()) return x_.empty() || x < x_.front() ? 0.0 : left_.front();
  if (x > x_.back()) return right_.back();
  const auto k = static_cast<std::size_t>(std::lower_bound(x_.begin(), x_.end(), x) - x_.begin());
  if (x == x_[k]) return left_[k];
  const double th = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return (1.0 - th) * right_[k - 1] + th * left_[k];
}

void Cdf::scale(double s) {
  for (double& v : left_) v *= s;
  for (double& v : right_) v *= s;
}

double l1_between(const Cdf& F, const Cdf& G) {
  std::vector<double> pts;
  pts.reserve(F.knots().size() + G.knots().size());
  std::merge(F.knots().begin(), F.knots().end(), G.knots().begin(), G.knots().end(),
             std::back_inserter(pts));
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double p = pts[k];
    const double q = pts[k + 1];
    const double d0 = F.right(p) - G.right(p);
    const double d1 = F.left(q) - G.left(q);
    const double a0 = std::abs(d0);
    const double a1 = std::abs(d1);
    if (d0 * d1 >= 0.0) {
      sum += 0.5 * (a0 + a1) * (q - p);
    } else {
      sum += 0.5 * (d0 * d0 + d1 * d1) / (a0 + a1) * (q - p);
    }
  }
  return sum;
}

namespace {

double distance(Cdf F, Cdf G) {
  const double mf = F.total();
  const double mg = G.total();
  if (!(mf > 0.0) || !(mg > 0.0)) throw std::invalid_argument("w1_distance: zero mass");
  if (std::abs(mf - mg) > 1e-9 * std::max(mf, mg)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "w1_distance: masses differ (" << mf << " vs " << mg << "), renormalizing";
    warn(msg.str());
  }
  G.scale(mf / mg);
  return l1_between(F, G);
}

}  // namespace

double w1_distance(const Field& mu, const Field& nu) { return distance(Cdf::of(mu), Cdf::of(nu)); }
double w1_distance(const Field& mu, const ParticleMeasure& nu) {
  return distance(Cdf::of(mu), Cdf::of(nu));
}
double w1_distance(const ParticleMeasure& mu, const Field& nu) {
  return distance(Cdf::of(mu), Cdf::of(nu));
}
double w1_distance(const ParticleMeasure& mu, const ParticleMeasure& nu) {
  return distance(Cdf::of(mu), Cdf::of(nu));
}

}  // namespace chemokin
