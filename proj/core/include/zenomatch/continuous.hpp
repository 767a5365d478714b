#pragma once

#include <utility>
#include <vector>

#include "zenomatch/params.hpp"

namespace zenomatch {

// Sampled non-Hermitian two-level evolution. p_tot = p1 + p2 decays as
// probability leaks into the (eliminated) detection channel; W = gamma*p2 is
// the detection rate.
struct ContinuousTrace {
  std::vector<double> t;      // seconds, strictly increasing
  std::vector<double> p1;     // ground-state population
  std::vector<double> p2;     // excited-state population
  std::vector<double> p_tot;  // p1 + p2
  std::vector<double> W;      // detection rate gamma*p2, 1/s
};

// The two coupling strengths that realize the same mean detection time, one
// on each side of the lifetime minimum.
struct GammaPair {
  double gamma_weak = 0.0;    // rad/s, below the minimizing rate
  double gamma_strong = 0.0;  // rad/s, above the minimizing rate
  double target_tau = 0.0;    // seconds
};

// Amplitudes of the driven, decaying two-level atom starting from the ground
// state:
//   psi1 = e^{-gamma0 t/4} [cosh(tR/2) + (gamma0/2R) sinh(tR/2)]
//   psi2 = -i (omega/R) e^{-gamma0 t/4} sinh(tR/2)
// Evaluated in exponent-split form so large gamma*t never overflows, with a
// series limit for |tR| -> 0 (critical damping).
std::pair<complex, complex> amplitudes(const EffectiveParams& e, double t);

// W(t) = gamma * |psi2(t)|^2.
double detection_rate(const EffectiveParams& e, double t);

// Mean detection time, closed form: tau_c = 2/gamma + gamma/omega^2
// + 4 delta^2/(gamma omega^2). Throws never_detected when gamma == 0.
double lifetime_continuous(const EffectiveParams& e);

struct OracleOptions {
  double tail_bound_factor = 1e-12;  // stop once p_tot(T)*(T+tau_hat) < this * result
  double rel_tol = 1e-11;            // per-segment quadrature tolerance
  int max_segments = 400;            // budget of tail-extension segments
};

// Independent numerical check of the closed form: integrates t*W(t) to
// infinity by adaptive quadrature, extending the horizon until the
// remaining-norm bound is negligible. Throws solver_error on non-convergence.
double lifetime_quadrature_oracle(const EffectiveParams& e,
                                  const OracleOptions& opt = {});

// Coupling strength minimizing tau_c: omega*sqrt(2 + 4 (delta/omega)^2).
double gamma_at_minimum(double omega, double delta);

// Solves tau_c(gamma) = target_tau on both sides of the minimum by bisection
// (tau_c is monotone on each side). Throws solver_error when the target lies
// below the minimum; returns a degenerate pair when it equals the minimum to
// within 1e-12 relative.
GammaPair find_gamma_pair(double omega, double delta, double target_tau);

// Uniformly samples populations on [0, t_max] with at least 40 points per
// population-oscillation period (2 Im R) and at least min_points overall.
ContinuousTrace sample_trace(const EffectiveParams& e, double t_max,
                             int min_points = 400);

}  // namespace zenomatch
