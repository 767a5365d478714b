#pragma once

#include <complex>

namespace zenomatch {

using complex = std::complex<double>;

// Physical inputs of the three-level lambda system. All rates and detunings
// are angular (rad/s); conversion from Hz happens at the CLI boundary.
struct ThreeLevelParams {
  double omega = 0.0;   // 1-2 driving Rabi frequency, rad/s
  double Omega = 0.0;   // 2-3 measurement-coupling Rabi frequency, rad/s
  double Gamma = 0.0;   // decay rate of level 3, rad/s
  double Delta = 0.0;   // 2-3 laser detuning, rad/s
  double delta0 = 0.0;  // 1-2 laser detuning, rad/s

  // Throws std::invalid_argument on omega <= 0, Omega < 0, Gamma < 0 or any
  // non-finite field. omega == 0 would make every detection time infinite.
  void validate() const;

  // Saturation parameter s0 = 2 Omega^2 / Gamma^2 of the coupling laser.
  double saturation() const { return 2.0 * Omega * Omega / (Gamma * Gamma); }

  // Advisory flag: the two-level reduction assumes Gamma >> Omega. Not
  // enforced anywhere; threshold is the Omega/Gamma ratio.
  bool adiabatic_elimination_valid(double threshold = 0.1) const {
    return Gamma > 0.0 && Omega <= threshold * Gamma;
  }
};

// Builds the Omega implied by a saturation parameter: Omega = Gamma*sqrt(s0/2).
double omega_coupling_from_saturation(double Gamma, double s0);

// Effective two-level quantities after eliminating the fast-decaying level.
struct EffectiveParams {
  double omega = 0.0;        // 1-2 driving Rabi frequency, rad/s
  double gamma = 0.0;        // effective decay rate, rad/s
  double delta = 0.0;        // effective 1-2 detuning (includes light shift), rad/s
  double delta_tilde = 0.0;  // combined 2-3 detuning Delta + delta0, rad/s
  complex gamma0;            // gamma - 2 i delta, rad/s
  complex R;                 // sqrt(gamma0^2 - 4 omega^2)/2, rad/s
  double tau_Z = 0.0;        // Zeno time 2/omega, seconds
};

// Direct construction from effective rates (delta_tilde defaults to the
// on-resonance coupling configuration). Throws std::invalid_argument on
// omega <= 0, gamma < 0 or non-finite input.
EffectiveParams make_effective(double omega, double gamma, double delta,
                               double delta_tilde = 0.0);

// Adiabatic elimination of level 3:
//   gamma = Gamma Omega^2 / (Gamma^2 + 4 dt~^2)
//   delta = delta0 - dt~ Omega^2 / (4 dt~^2 + Gamma^2),  dt~ = Delta + delta0.
// Throws std::invalid_argument when Gamma = delta_tilde = 0 with Omega > 0
// (the reduction divides by Gamma^2 + 4 dt~^2).
EffectiveParams reduce_to_effective(const ThreeLevelParams& p);

// One branch of R = sqrt(gamma0^2 - 4 omega^2)/2. Downstream formulas are
// even in R, so either branch is acceptable (property-tested, not enforced).
complex complex_root_R(const EffectiveParams& e);

}  // namespace zenomatch
