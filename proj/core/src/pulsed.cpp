#include "zenomatch/pulsed.hpp"

#include <cmath>
#include <stdexcept>

#include "zenomatch/errors.hpp"

namespace zenomatch {

void PulseScheme::validate() const {
  if (!std::isfinite(delta_t) || !std::isfinite(delta0) || !std::isfinite(omega)) {
    throw std::invalid_argument("pulse scheme parameters must be finite");
  }
  if (!(delta_t > 0.0)) throw std::invalid_argument("delta_t must be positive");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
}

double DetectionDistribution::pmf(long k) const {
  if (k < 1) throw std::invalid_argument("detection pulse index starts at 1");
  return P2 * std::pow(1.0 - P2, static_cast<double>(k - 1));
}

double excitation_probability(const PulseScheme& s) {
  s.validate();
  const double Or2 = s.omega * s.omega + s.delta0 * s.delta0;
  const double Or = std::sqrt(Or2);
  const double sn = std::sin(0.5 * Or * s.delta_t);
  return s.omega * s.omega / Or2 * sn * sn;
}

double excitation_probability_derivative(const PulseScheme& s) {
  s.validate();
  const double Or = std::sqrt(s.omega * s.omega + s.delta0 * s.delta0);
  return s.omega * s.omega * std::sin(Or * s.delta_t) / (2.0 * Or);
}

double mean_detection_time(const PulseScheme& s) {
  const double P2 = excitation_probability(s);
  if (P2 <= 0.0) {
    throw never_detected("P2 = 0: every projection finds the ground state");
  }
  return s.delta_t / P2;
}

DetectionDistribution detection_distribution(const PulseScheme& s) {
  DetectionDistribution d;
  d.P2 = excitation_probability(s);
  d.mean_time = mean_detection_time(s);
  return d;
}

double geometric_series_oracle(const PulseScheme& s, double tail_tol) {
  const double P2 = excitation_probability(s);
  if (P2 <= 0.0) {
    throw never_detected("P2 = 0: geometric series never terminates");
  }
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be positive");

  const double q = 1.0 - P2;
  double sum = 0.0;
  double comp = 0.0;  // Kahan compensation
  double qpow = 1.0;  // q^{k-1}
  for (long k = 1;; ++k) {
    const double term = static_cast<double>(k) * s.delta_t * P2 * qpow;
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;

    // Exact geometric remainder after k terms:
    //   sum_{j>k} j dt P2 q^{j-1} = dt q^k (1 + k P2) / P2.
    const double tail =
        s.delta_t * qpow * q * (1.0 + static_cast<double>(k) * P2) / P2;
    if (tail < tail_tol * sum) break;
    qpow *= q;
  }
  return sum;
}

double effective_pulsed_lifetime(const PulseScheme& s) {
  s.validate();
  const double tau_Z = 2.0 / s.omega;
  return tau_Z * tau_Z / s.delta_t;
}

bool zeno_regime_ok(const PulseScheme& s) {
  return s.delta_t <= 0.5 * (2.0 / s.omega);
}

std::vector<SurvivalPoint> survival_curve(const PulseScheme& s, long k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  const double P2 = excitation_probability(s);
  const double tau_EP = effective_pulsed_lifetime(s);

  std::vector<SurvivalPoint> curve;
  curve.reserve(k_max);
  double p1 = 1.0;
  for (long k = 1; k <= k_max; ++k) {
    p1 *= 1.0 - P2;  // projective removal of the excited component each pulse
    SurvivalPoint pt;
    pt.k = k;
    pt.t = static_cast<double>(k) * s.delta_t;
    pt.p1_exact = p1;
    pt.p1_exponential = std::exp(-pt.t / tau_EP);
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace zenomatch
