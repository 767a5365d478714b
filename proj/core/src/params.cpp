#include "zenomatch/params.hpp"

#include <cmath>
#include <stdexcept>

namespace zenomatch {

namespace {

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void ThreeLevelParams::validate() const {
  if (!all_finite({omega, Omega, Gamma, Delta, delta0})) {
    throw std::invalid_argument("three-level parameters must be finite");
  }
  if (omega <= 0.0) {
    throw std::invalid_argument(
        "omega must be positive: without driving, no detection ever occurs");
  }
  if (Omega < 0.0) throw std::invalid_argument("Omega must be non-negative");
  if (Gamma < 0.0) throw std::invalid_argument("Gamma must be non-negative");
}

double omega_coupling_from_saturation(double Gamma, double s0) {
  if (!(Gamma >= 0.0) || !(s0 >= 0.0)) {
    throw std::invalid_argument("saturation and Gamma must be non-negative");
  }
  return Gamma * std::sqrt(s0 / 2.0);
}

EffectiveParams make_effective(double omega, double gamma, double delta,
                               double delta_tilde) {
  if (!all_finite({omega, gamma, delta, delta_tilde})) {
    throw std::invalid_argument("effective parameters must be finite");
  }
  if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
  if (gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");

  EffectiveParams e;
  e.omega = omega;
  e.gamma = gamma;
  e.delta = delta;
  e.delta_tilde = delta_tilde;
  e.gamma0 = complex(gamma, -2.0 * delta);
  e.R = complex_root_R(e);
  e.tau_Z = 2.0 / omega;
  return e;
}

EffectiveParams reduce_to_effective(const ThreeLevelParams& p) {
  p.validate();
  const double dt = p.Delta + p.delta0;
  const double denom = p.Gamma * p.Gamma + 4.0 * dt * dt;
  if (denom == 0.0 && p.Omega > 0.0) {
    throw std::invalid_argument(
        "invalid reduction: Gamma and Delta+delta0 both zero with Omega > 0");
  }
  // With Omega == 0 the coupling laser is off and the bare two-level system
  // remains: gamma = 0, delta = delta0.
  const double gamma = denom > 0.0 ? p.Gamma * p.Omega * p.Omega / denom : 0.0;
  const double shift = denom > 0.0 ? dt * p.Omega * p.Omega / denom : 0.0;
  return make_effective(p.omega, gamma, p.delta0 - shift, dt);
}

complex complex_root_R(const EffectiveParams& e) {
  const complex g0(e.gamma, -2.0 * e.delta);
  return std::sqrt(g0 * g0 - 4.0 * e.omega * e.omega) / 2.0;
}

}  // namespace zenomatch
