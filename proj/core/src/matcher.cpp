#include "zenomatch/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>

#include "zenomatch/continuous.hpp"
#include "zenomatch/errors.hpp"

namespace zenomatch {

PulseScheme matched_scheme(const EffectiveParams& e, double delta_t) {
  PulseScheme s;
  s.delta_t = delta_t;
  s.delta0 = e.delta;  // zero combined-detuning configuration
  s.omega = e.omega;
  return s;
}

double pulse_interval_approx(const EffectiveParams& e) {
  if (e.gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
  const double w2 = e.omega * e.omega;
  return 4.0 * e.gamma / (2.0 * w2 + e.gamma * e.gamma + 4.0 * e.delta * e.delta);
}

namespace {

double p2_derivative(const EffectiveParams& e, double x, DerivMode mode) {
  if (mode == DerivMode::approx) {
    return 0.5 * x * e.omega * e.omega;  // quadratic-regime slope
  }
  return excitation_probability_derivative(matched_scheme(e, x));
}

double residual_at(const EffectiveParams& e, double x, double tau_c) {
  const double P2 = excitation_probability(matched_scheme(e, x));
  if (P2 <= 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(x / P2 - tau_c) / tau_c;
}

}  // namespace

double newton_step(const EffectiveParams& e, double delta_t0, DerivMode mode) {
  if (!(delta_t0 > 0.0)) throw std::invalid_argument("delta_t0 must be positive");
  const double tau_c = lifetime_continuous(e);
  const double P2 = excitation_probability(matched_scheme(e, delta_t0));
  const double D = p2_derivative(e, delta_t0, mode);
  const double denom = 1.0 / tau_c - D;
  if (std::abs(denom) < 1e-14 * std::max(1.0 / tau_c, std::abs(D))) {
    throw solver_error("singular Newton step: 1/tau_c - P2' vanished");
  }
  return (P2 - delta_t0 * D) / denom;
}

namespace {

// Left/right bracket around the smallest positive root of
// g(x) = x - tau_c*P2(x). Every positive root lies in P2's first arch
// (0, 2 pi/Omega_R): later arches repeat the same P2 values against a larger
// line, so if the line clears the first arch it clears them all.
struct RootBracket {
  double lo = 0.0;  // g(lo) >= 0
  double hi = 0.0;  // g(hi) < 0
};

}  // namespace

MatchResult solve_pulse_interval(const EffectiveParams& e,
                                 const SolveOptions& opt) {
  const double tau_c = lifetime_continuous(e);
  const double Or = std::hypot(e.omega, e.delta);  // matched-scheme Rabi rate
  const double arch_end = 2.0 * std::numbers::pi / Or;
  const auto g = [&](double x) {
    return x - tau_c * excitation_probability(matched_scheme(e, x));
  };

  // Seed = 4/(tau_c omega^2) and P2(x) <= x^2 omega^2/4 give g(seed) >= 0:
  // the seed never overshoots the smallest root.
  const double seed = pulse_interval_approx(e);

  // Bracket the first sign change deterministically before iterating: scan
  // the arch, then refine toward the dip minimum if the scan saw none
  // (near-tangent line). Costs only sine evaluations.
  RootBracket br;
  br.lo = seed;
  bool have_hi = false;
  {
    constexpr int kScan = 64;
    double prev = seed;
    for (int k = 1; k <= kScan; ++k) {
      const double x =
          seed + (arch_end - seed) * static_cast<double>(k) / kScan;
      if (g(x) < 0.0) {
        br.lo = prev;
        br.hi = x;
        have_hi = true;
        break;
      }
      prev = x;
    }
    if (!have_hi) {
      // Golden-section minimize g over the arch; a dip below zero narrower
      // than the scan grid can still be caught here.
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = seed, b = arch_end;
      double c = b - gr * (b - a), d = a + gr * (b - a);
      double fc = g(c), fd = g(d);
      for (int k = 0; k < 120 && (b - a) > 1e-14 * arch_end; ++k) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - gr * (b - a);
          fc = g(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + gr * (b - a);
          fd = g(d);
        }
        const double xm = fc < fd ? c : d;
        if (g(xm) < 0.0) {
          br.lo = a;
          br.hi = xm;
          have_hi = true;
          break;
        }
      }
    }
  }
  if (!have_hi) {
    const double best = 0.5 * (seed + arch_end);
    throw non_convergence(
        "no pulse interval matches the continuous lifetime: delta_t stays "
        "above tau_c*P2(delta_t) over the whole first arch",
        best, residual_at(e, best, tau_c), 0);
  }

  MatchResult res;
  res.method = "newton";
  res.tau_c = tau_c;

  double x = br.lo;
  double best_x = x;
  double best_res = residual_at(e, x, tau_c);

  for (int it = 1; it <= opt.max_iter; ++it) {
    double proposal;
    bool newton_ok = true;
    try {
      proposal = newton_step(e, x, opt.deriv);
    } catch (const solver_error&) {
      newton_ok = false;
      proposal = 0.0;
    }
    if (!newton_ok || !std::isfinite(proposal) || proposal <= br.lo ||
        proposal >= br.hi) {
      proposal = 0.5 * (br.lo + br.hi);  // safeguard: bisect
    }

    x = proposal;
    if (g(x) >= 0.0) {
      br.lo = x;
    } else {
      br.hi = x;
    }

    res.iterations = it;
    const double r = residual_at(e, x, tau_c);
    if (r < best_res) {
      best_res = r;
      best_x = x;
    }
    if (r < opt.tol) {
      res.delta_t = x;
      res.residual = r;
      res.mean_t = mean_detection_time(matched_scheme(e, x));
      return res;
    }
  }
  throw non_convergence("pulse-interval solve did not reach tolerance", best_x,
                        best_res, res.iterations);
}

namespace {

// delta(delta0) at fixed Delta, Omega, Gamma; the calibration solves
// delta = 0.
double effective_detuning(double delta0, double Delta, double Omega,
                          double Gamma) {
  const double dt = Delta + delta0;
  return delta0 - dt * Omega * Omega / (4.0 * dt * dt + Gamma * Gamma);
}

double effective_detuning_slope(double delta0, double Delta, double Omega,
                                double Gamma) {
  const double dt = Delta + delta0;
  const double den = 4.0 * dt * dt + Gamma * Gamma;
  return 1.0 - Omega * Omega * (Gamma * Gamma - 4.0 * dt * dt) / (den * den);
}

}  // namespace

double calibrate_delta0(double Delta, double Omega, double Gamma,
                        CalibrationMode mode) {
  if (!(Gamma > 0.0)) throw std::invalid_argument("Gamma must be positive");
  if (!(Omega >= 0.0)) throw std::invalid_argument("Omega must be non-negative");
  if (!std::isfinite(Delta)) throw std::invalid_argument("Delta must be finite");
  if (Omega == 0.0 || Delta == 0.0) return 0.0;  // no light shift to cancel

  const double approx =
      Delta * Omega * Omega / (4.0 * Delta * Delta + Gamma * Gamma);
  if (mode == CalibrationMode::approx) return approx;

  // |light shift| = |dt| Omega^2/(4 dt^2 + Gamma^2) <= Omega^2/(4 Gamma) for
  // all dt, so the root is confined to that symmetric bracket. Widen a few
  // times if rounding at the edges spoils the sign change.
  double half_width = Omega * Omega / (4.0 * Gamma) * 1.000001;
  double lo = -half_width, hi = half_width;
  auto f = [&](double d0) { return effective_detuning(d0, Delta, Omega, Gamma); };
  int widen = 0;
  while (f(lo) * f(hi) > 0.0) {
    if (++widen > 8) {
      throw solver_error("calibration bracket failed to enclose a sign change");
    }
    half_width *= 4.0;
    lo = -half_width;
    hi = half_width;
  }
  if (f(lo) > 0.0) std::swap(lo, hi);  // keep f(lo) < 0 <= f(hi)

  double x = std::clamp(approx, std::min(lo, hi), std::max(lo, hi));
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = effective_detuning_slope(x, Delta, Omega, Gamma);
    double next = slope != 0.0 ? x - fx / slope : 0.5 * (lo + hi);
    const double lo_ = std::min(lo, hi), hi_ = std::max(lo, hi);
    if (!(next > lo_ && next < hi_)) next = 0.5 * (lo + hi);

    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace zenomatch
