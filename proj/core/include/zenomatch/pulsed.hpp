#pragma once

#include <vector>

namespace zenomatch {

// Projective measurement every delta_t seconds; the free evolution between
// pulses runs at the BARE detuning delta0 (the level shift of the continuous
// scheme does not apply while the coupling laser is off).
struct PulseScheme {
  double delta_t = 0.0;  // interval between projections, seconds
  double delta0 = 0.0;   // bare 1-2 detuning, rad/s
  double omega = 0.0;    // 1-2 driving Rabi frequency, rad/s

  void validate() const;  // delta_t > 0, omega > 0, all finite
};

// Geometric detection-time statistics: detection at the k-th pulse has
// probability P2 (1-P2)^{k-1}, k = 1, 2, ...
struct DetectionDistribution {
  double P2 = 0.0;         // excitation probability per interval
  double mean_time = 0.0;  // delta_t / P2, seconds

  double pmf(long k) const;  // k >= 1
};

// P2 = omega^2/(omega^2+delta0^2) * sin^2(delta_t*sqrt(omega^2+delta0^2)/2).
double excitation_probability(const PulseScheme& s);

// Closed-form derivative dP2/d(delta_t) = omega^2 sin(Omega_R delta_t)/(2 Omega_R)
// with Omega_R = sqrt(omega^2 + delta0^2).
double excitation_probability_derivative(const PulseScheme& s);

// <t> = delta_t / P2. Throws never_detected when P2 == 0 (a node of the
// Rabi oscillation).
double mean_detection_time(const PulseScheme& s);

DetectionDistribution detection_distribution(const PulseScheme& s);

// Brute-force mean: sums k*delta_t*P2*(1-P2)^{k-1} until the exact geometric
// remainder drops below tail_tol * partial_sum. Kahan-compensated.
double geometric_series_oracle(const PulseScheme& s, double tail_tol = 1e-12);

// Effective exponential lifetime tau_EP = tau_Z^2/delta_t, tau_Z = 2/omega.
// Accuracy degrades for delta_t approaching tau_Z; see zeno_regime_ok.
double effective_pulsed_lifetime(const PulseScheme& s);

// True when delta_t <= 0.5*tau_Z, the regime where the exponential decay law
// is a good description. Informational; nothing rejects the complement.
bool zeno_regime_ok(const PulseScheme& s);

struct SurvivalPoint {
  long k = 0;                  // pulse index
  double t = 0.0;              // k * delta_t, seconds
  double p1_exact = 0.0;       // (1-P2)^k
  double p1_exponential = 0.0; // exp(-t/tau_EP)
};

// Ground-state survival after each of the first k_max pulses, with the
// exponential approximation alongside.
std::vector<SurvivalPoint> survival_curve(const PulseScheme& s, long k_max);

}  // namespace zenomatch
