#pragma once

namespace chemokin {

// Odd quintic saturation s(u) = (15u - 10u^3 + 3u^5)/8 on [-1, 1], clamped
// to sign(u) outside. C^2, nondecreasing, s'(0) = 15/8 is its maximum slope.
double saturation(double u);
double saturation_derivative(double u);
// Antiderivative of s with value 0 at 0.
double saturation_integral(double u);

struct TurningParams {
  double phi0 = 1.0;   // turning-rate scale
  double alpha = 1.0;  // sensing threshold
  double c = 1.0;      // cell speed
};

/// Turning rate phi, macroscopic velocity a and its antiderivative A.
///
/// phi(x) = phi0 (5/8 - 3/8 s(x/alpha)) so that phi = phi0 for x <= -alpha,
/// phi = phi0/4 for x >= alpha and phi(x) + phi(-x) = 5/4 phi0. The velocity
/// law a(sigma) = 4/5 c (phi(-c sigma) - phi(c sigma)) then reduces to
/// 3/5 c phi0 s(c sigma / alpha).
///
/// Immutable after construction.
class TurningModel {
 public:
  /// Throws std::invalid_argument unless phi0, alpha and c are positive and finite.
  explicit TurningModel(TurningParams params = {});

  const TurningParams& params() const { return params_; }
  double phi0() const { return params_.phi0; }
  double alpha() const { return params_.alpha; }
  double c() const { return params_.c; }

  double phi(double x) const;
  double phi_derivative(double x) const;

  // a(sigma) for a chemoattractant gradient sigma.
  double velocity(double sigma) const;
  double velocity_derivative(double sigma) const;
  // A(sigma) with A(0) = 0 and A' = a.
  double velocity_potential(double sigma) const;

  // Total reversal rate phi(c sigma) + phi(-c sigma); constant by symmetry.
  double relaxation_rate() const { return 1.25 * params_.phi0; }

  // ||phi'||_inf = 45/64 phi0/alpha.
  double phi_derivative_sup() const;
  // sup |a| = 3/5 c phi0.
  double velocity_sup() const;
  // ||a'||_inf = 3/5 c^2 phi0 (15/8) / alpha.
  double velocity_lipschitz() const;

  // zeta with a(sigma) sigma >= zeta sigma^2 on |sigma| <= R (R > 0); s(u)/u
  // is nonincreasing on u > 0 so a(R)/R is the sharp constant.
  double coercivity(double R) const;

 private:
  TurningParams params_;
};

}  // namespace chemokin
