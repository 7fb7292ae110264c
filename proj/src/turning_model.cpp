#include "chemokin/turning_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chemokin {

double saturation(double u) {
  if (u >= 1.0) return 1.0;
  if (u <= -1.0) return -1.0;
  const double u2 = u * u;
  return u * (15.0 - 10.0 * u2 + 3.0 * u2 * u2) / 8.0;
}

double saturation_derivative(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  return 15.0 * w * w / 8.0;
}

double saturation_integral(double u) {
  const double au = std::abs(u);
  if (au > 1.0) return au - 5.0 / 16.0;
  const double u2 = u * u;
  return u2 * (15.0 - 5.0 * u2 + u2 * u2) / 16.0;
}

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("TurningModel: ") + name +
                                " must be positive and finite");
  }
}

}  // namespace

TurningModel::TurningModel(TurningParams params) : params_(params) {
  require_positive(params_.phi0, "phi0");
  require_positive(params_.alpha, "alpha");
  require_positive(params_.c, "c");
}

double TurningModel::phi(double x) const {
  return params_.phi0 * (0.625 - 0.375 * saturation(x / params_.alpha));
}

double TurningModel::phi_derivative(double x) const {
  return -0.375 * params_.phi0 * saturation_derivative(x / params_.alpha) /
         params_.alpha;
}

double TurningModel::velocity(double sigma) const {
  const double c = params_.c;
  return 0.6 * c * params_.phi0 * saturation(c * sigma / params_.alpha);
}

double TurningModel::velocity_derivative(double sigma) const {
  const double c = params_.c;
  return 0.6 * c * c * params_.phi0 *
         saturation_derivative(c * sigma / params_.alpha) / params_.alpha;
}

double TurningModel::velocity_potential(double sigma) const {
  return 0.6 * params_.phi0 * params_.alpha *
         saturation_integral(params_.c * sigma / params_.alpha);
}

double TurningModel::phi_derivative_sup() const {
  return 45.0 / 64.0 * params_.phi0 / params_.alpha;
}

double TurningModel::velocity_sup() const {
  return 0.6 * params_.c * params_.phi0;
}

double TurningModel::velocity_lipschitz() const {
  const double c = params_.c;
  return 0.6 * c * c * params_.phi0 * (15.0 / 8.0) / params_.alpha;
}

double TurningModel::coercivity(double R) const {
  if (!(R > 0.0)) throw std::invalid_argument("coercivity: R must be positive");
  return velocity(R) / R;
}

}  // namespace chemokin
