#pragma once

#include "zenomatch/params.hpp"
#include "zenomatch/pulsed.hpp"

namespace zenomatch {

// How the Newton update obtains dP2/d(delta_t): the quadratic-regime
// approximation delta_t*omega^2/2, or the closed-form derivative.
enum class DerivMode { approx, exact };

// Solved pulse interval with its diagnostics. residual is always
// |<t> - tau_c| / tau_c evaluated at delta_t.
struct MatchResult {
  double delta_t = 0.0;    // seconds
  int iterations = 0;      // Newton/bisection steps consumed (0 for approx)
  double residual = 0.0;   // |mean_t - tau_c| / tau_c
  double tau_c = 0.0;      // continuous mean detection time, seconds
  double mean_t = 0.0;     // pulsed mean detection time at delta_t, seconds
  const char* method = "approx";  // "approx" or "newton"
};

// The matched pulse scheme drives at bare detuning equal to the effective
// detuning (the zero combined-detuning configuration), interval delta_t.
PulseScheme matched_scheme(const EffectiveParams& e, double delta_t);

// Closed-form interval equating the exponential-decay pulsed lifetime with
// the continuous one: delta_t = 4 gamma / (2 omega^2 + gamma^2 + 4 delta^2).
double pulse_interval_approx(const EffectiveParams& e);

// One update of delta_t = [P2(x) - x P2'(x)] / (tau_c^{-1} - P2'(x)).
// A root of x = tau_c P2(x) is a fixed point for ANY value used as P2'.
// Throws solver_error when the denominator vanishes (singular step).
double newton_step(const EffectiveParams& e, double delta_t0,
                   DerivMode mode = DerivMode::approx);

struct SolveOptions {
  double tol = 1e-10;                  // residual tolerance on |<t>-tau_c|/tau_c
  int max_iter = 50;                   // iteration budget
  DerivMode deriv = DerivMode::exact;  // see newton_step; exact converges
                                       // quadratically, approx is a linear
                                       // contraction that can stall near the
                                       // lifetime minimum
};

// Solves delta_t = tau_c * P2(delta_t) for the smallest positive root by
// bracket-safeguarded Newton from the closed-form seed. The seed identity
// seed = 4/(tau_c omega^2) together with P2(x) <= x^2 omega^2/4 guarantees
// the seed never overshoots the smallest root, so it is a valid left
// bracket. Throws non_convergence (with best iterate) or solver_error when
// no root exists (the line delta_t clears every arch of tau_c*P2).
MatchResult solve_pulse_interval(const EffectiveParams& e,
                                 const SolveOptions& opt = {});

enum class CalibrationMode { approx, exact };

// Bare detuning delta0 that cancels the effective detuning (delta = 0) at
// fixed Delta, Omega, Gamma.
//   approx: delta0 = Delta Omega^2 / (4 Delta^2 + Gamma^2)
//   exact : real root of 4 d0 (Delta+d0)^2 + d0 Gamma^2 - (Delta+d0) Omega^2 = 0
//           nearest the approx value (safeguarded Newton with bisection
//           fallback on a bracket around it).
// Throws std::invalid_argument for Gamma <= 0; solver_error if bracketing
// fails after widening.
double calibrate_delta0(double Delta, double Omega, double Gamma,
                        CalibrationMode mode = CalibrationMode::exact);

}  // namespace zenomatch
