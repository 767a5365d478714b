#pragma once

#include <array>
#include <vector>

#include "zenomatch/params.hpp"

namespace zenomatch {

// Non-Hermitian generator of the three-level interaction-picture dynamics,
// basis |1>, |2>, |3>, angular units:
//   [ 0        omega/2   0                          ]
//   [ omega/2  -delta0   Omega/2                    ]
//   [ 0        Omega/2   -i Gamma/2 - (Delta+delta0)]
// The anti-Hermitian part only removes norm (decay of level 3).
struct Hamiltonian3 {
  std::array<std::array<complex, 3>, 3> m{};

  const complex& operator()(int r, int c) const { return m[r][c]; }
  complex& operator()(int r, int c) { return m[r][c]; }
};

struct StateVector3 {
  std::array<complex, 3> c{};  // amplitudes of |1>, |2>, |3>

  double p1() const { return std::norm(c[0]); }
  double p2() const { return std::norm(c[1]); }
  double p3() const { return std::norm(c[2]); }
  double p_tot() const { return p1() + p2() + p3(); }
};

struct Trajectory3 {
  std::vector<double> t;      // seconds
  std::vector<double> p1;
  std::vector<double> p2;
  std::vector<double> p3;
  std::vector<double> p_tot;
  std::vector<StateVector3> states;  // amplitudes at the grid points
};

Hamiltonian3 build_hamiltonian(const ThreeLevelParams& p);

// Frequency scale governing the integrator step: an upper bound on the
// spectral radius (Frobenius norm), floored at Gamma. The fixed RK4 step is
// (2 pi / Lambda) / steps_per_cycle.
double frequency_scale(const Hamiltonian3& h, double Gamma);

struct PropagateOptions {
  int steps_per_cycle = 40;  // RK4 steps per shortest cycle 2 pi / Lambda
};

// Fixed-step RK4 solution of i dpsi/dt = H psi, internally rescaled to the
// dimensionless time Lambda*t, sampled exactly at the (increasing, from 0)
// grid times. Throws solver_error if a grid interval would need more steps
// than can be counted (advising rescaled units).
Trajectory3 propagate(const Hamiltonian3& h, const StateVector3& psi0,
                      const std::vector<double>& t_grid, double Gamma,
                      const PropagateOptions& opt = {});

// Final state only, same integrator.
StateVector3 propagate_state(const Hamiltonian3& h, const StateVector3& psi0,
                             double t, double Gamma,
                             const PropagateOptions& opt = {});

struct LifetimeOptions {
  double p_tot_stop = 1e-8;   // integrate until the total population falls here
  double max_scaled_time = 1e14;  // cap on Lambda*T before declaring failure
  int steps_per_cycle = 40;
};

struct Lifetime3Result {
  double tau3 = 0.0;            // mean emission time, seconds
  double detected_fraction = 0.0;  // integral of Gamma p3 plus tail (should be 1)
  double integration_time = 0.0;   // horizon T reached, seconds
  long steps = 0;                  // RK4 steps spent
};

// Mean time of irreversible emission from level 3,
//   tau3 = integral of t * Gamma * p3(t) dt,
// accumulated by Simpson's rule on the RK4 grid from |1> at t=0, with a
// single-exponential tail added once p_tot < p_tot_stop (rate fitted from the
// last decade of p_tot). Throws never_detected when the effective decay rate
// vanishes (Omega or Gamma zero); solver_error when the tail never converges.
Lifetime3Result lifetime_three_level_full(const ThreeLevelParams& p,
                                          const LifetimeOptions& opt = {});

double lifetime_three_level(const ThreeLevelParams& p,
                            const LifetimeOptions& opt = {});

struct ModelDiscrepancy {
  double max_dp1 = 0.0;  // max over the grid of |p1_three - p1_effective|
  double max_dp2 = 0.0;  // max over the grid of |p2_three - p2_effective|
};

// Propagates the three-level system on t_grid and evaluates the effective
// two-level closed form on the same grid.
ModelDiscrepancy compare_models(const ThreeLevelParams& p,
                                const std::vector<double>& t_grid,
                                const PropagateOptions& opt = {});

}  // namespace zenomatch
