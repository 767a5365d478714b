#include "zenomatch/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "zenomatch/errors.hpp"
#include "zenomatch/quadrature.hpp"

namespace zenomatch {

namespace {

// Slowest population decay rate: |psi|^2 modes decay at gamma/2 -/+ Re R.
// Falls back to the weak-driving asymptote if cancellation wipes it out.
double slowest_population_rate(const EffectiveParams& e) {
  const double lam = e.gamma / 2.0 - std::abs(e.R.real());
  if (lam > 1e-12 * e.gamma) return lam;
  return e.omega * e.omega * e.gamma /
         (e.gamma * e.gamma + 4.0 * e.delta * e.delta + 2.0 * e.omega * e.omega);
}

}  // namespace

std::pair<complex, complex> amplitudes(const EffectiveParams& e, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("amplitude time must be >= 0");
  const complex g0 = e.gamma0;
  const complex R = e.R;
  const complex z = 0.5 * t * R;     // argument of cosh/sinh
  const complex pref = -0.25 * g0 * t;

  if (std::abs(R) * t < 1e-6) {
    // Critical-damping limit: sinh(tR/2)/R -> t/2 (1 + z^2/6 + ...).
    const complex sinhc = 0.5 * t * (1.0 + z * z / 6.0);
    const complex envelope = std::exp(pref);
    const complex psi1 = envelope * (std::cosh(z) + 0.5 * g0 * sinhc);
    const complex psi2 = complex(0, -1) * e.omega * envelope * sinhc;
    return {psi1, psi2};
  }

  // Exponent-split mode form: psi is a combination of exp(pref +/- z), and
  // Re(pref +/- z) <= 0 for all t >= 0 (populations cannot grow), so neither
  // exponential can overflow no matter how large gamma*t gets.
  const complex ep = std::exp(pref + z);
  const complex em = std::exp(pref - z);
  const complex w = 0.5 * g0 / R;
  const complex psi1 = 0.5 * ((1.0 + w) * ep + (1.0 - w) * em);
  const complex psi2 = complex(0, -1) * (0.5 * e.omega / R) * (ep - em);
  return {psi1, psi2};
}

double detection_rate(const EffectiveParams& e, double t) {
  if (e.gamma == 0.0) return 0.0;
  return e.gamma * std::norm(amplitudes(e, t).second);
}

double lifetime_continuous(const EffectiveParams& e) {
  if (e.gamma <= 0.0) {
    throw never_detected("gamma = 0: the atom is never detected (infinite lifetime)");
  }
  const double w2 = e.omega * e.omega;
  return 2.0 / e.gamma + e.gamma / w2 + 4.0 * e.delta * e.delta / (e.gamma * w2);
}

double lifetime_quadrature_oracle(const EffectiveParams& e,
                                  const OracleOptions& opt) {
  const double tau_hat = lifetime_continuous(e);  // scale for the tail bound only
  const double lam = slowest_population_rate(e);

  const auto integrand = [&](double t) { return t * detection_rate(e, t); };

  quadrature::Options qopt;
  qopt.rel_tol = opt.rel_tol;

  // The fast decay mode (width 1/(gamma/2 + |Re R|)) and the population
  // oscillation (rate 2 Im R) live on scales far below a 3/lam segment, so a
  // single panel's nodes can straddle them without sampling them at all and
  // the refinement loop never learns they exist. Seed each segment with a
  // geometric ladder of sub-intervals anchored at the fastest scale so every
  // feature is visible before adaptive refinement takes over.
  const double fast = std::max({e.gamma / 2.0 + std::abs(e.R.real()),
                                2.0 * std::abs(e.R.imag()), lam});

  double total = 0.0;
  double T = 0.0;
  const double segment = 3.0 / lam;
  for (int seg = 0; seg < opt.max_segments; ++seg) {
    const double seg_end = T + segment;
    double lo = T;
    double width = 1.0 / fast;
    while (lo < seg_end) {
      const double hi = std::min(lo + width, seg_end);
      qopt.abs_tol = opt.rel_tol * std::abs(total) / 256.0;
      const auto r = quadrature::integrate(integrand, lo, hi, qopt);
      if (!r.converged) {
        throw solver_error("lifetime quadrature did not converge on a segment");
      }
      total += r.value;
      lo = hi;
      width *= 2.0;
    }
    T = seg_end;

    const auto [psi1, psi2] = amplitudes(e, T);
    const double p_tot = std::norm(psi1) + std::norm(psi2);
    if (p_tot * (T + tau_hat) < opt.tail_bound_factor * total) {
      return total;
    }
  }
  throw solver_error("lifetime quadrature: tail bound never satisfied");
}

double gamma_at_minimum(double omega, double delta) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const double r = delta / omega;
  return omega * std::sqrt(2.0 + 4.0 * r * r);
}

namespace {

double tau_of_gamma(double omega, double delta, double gamma) {
  return lifetime_continuous(make_effective(omega, gamma, delta));
}

// Bisection for tau_c(gamma) = target on a bracket where tau_c is monotone.
// increasing == true on the strong-coupling side.
double bisect_tau(double omega, double delta, double target, double lo,
                  double hi, bool increasing) {
  for (int i = 0; i < 200 && (hi - lo) > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const bool above = tau_of_gamma(omega, delta, mid) > target;
    if (above == increasing) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GammaPair find_gamma_pair(double omega, double delta, double target_tau) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(target_tau > 0.0) || !std::isfinite(target_tau)) {
    throw std::invalid_argument("target lifetime must be positive and finite");
  }
  const double gstar = gamma_at_minimum(omega, delta);
  const double tau_min = tau_of_gamma(omega, delta, gstar);

  if (target_tau < tau_min * (1.0 - 1e-12)) {
    throw solver_error("no gamma realizes the target lifetime: it lies below "
                       "the minimum of the lifetime curve");
  }
  GammaPair pair;
  pair.target_tau = target_tau;
  if (target_tau <= tau_min * (1.0 + 1e-12)) {
    pair.gamma_weak = pair.gamma_strong = gstar;  // degenerate: the minimum itself
    return pair;
  }

  // Weak side: tau_c ~ 2/gamma blows up as gamma -> 0, so a small enough lo
  // always lies above the target.
  double lo = std::min(1e-12 * omega, 1.0 / target_tau);
  pair.gamma_weak = bisect_tau(omega, delta, target_tau, lo, gstar, false);

  // Strong side: tau_c ~ gamma/omega^2 grows without bound.
  double hi = 2.0 * gstar;
  while (tau_of_gamma(omega, delta, hi) < target_tau) hi *= 2.0;
  pair.gamma_strong = bisect_tau(omega, delta, target_tau, gstar, hi, true);

  for (double g : {pair.gamma_weak, pair.gamma_strong}) {
    const double resid = std::abs(tau_of_gamma(omega, delta, g) - target_tau) /
                         target_tau;
    if (resid > 1e-10) {
      throw solver_error("gamma-pair bisection residual exceeded 1e-10");
    }
  }
  return pair;
}

ContinuousTrace sample_trace(const EffectiveParams& e, double t_max,
                             int min_points) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("trace t_max must be positive and finite");
  }
  if (min_points < 2) min_points = 2;

  // Populations oscillate at 2|Im R|; resolve each period with >= 40 points.
  const double osc = 2.0 * std::abs(e.R.imag());
  long n = min_points;
  if (osc > 0.0) {
    const double period = 2.0 * std::numbers::pi / osc;
    n = std::max<long>(n, static_cast<long>(std::ceil(40.0 * t_max / period)) + 1);
  }
  if (n > 50'000'000L) {
    throw std::invalid_argument("trace grid would exceed 5e7 points; shorten t_max");
  }

  ContinuousTrace trace;
  trace.t.reserve(n);
  const double dt = t_max / static_cast<double>(n - 1);
  for (long i = 0; i < n; ++i) {
    const double t = i == n - 1 ? t_max : dt * static_cast<double>(i);
    const auto [psi1, psi2] = amplitudes(e, t);
    const double p1 = std::norm(psi1);
    const double p2 = std::norm(psi2);
    trace.t.push_back(t);
    trace.p1.push_back(p1);
    trace.p2.push_back(p2);
    trace.p_tot.push_back(p1 + p2);
    trace.W.push_back(e.gamma * p2);
  }
  return trace;
}

}  // namespace zenomatch
