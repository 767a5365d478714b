#include "zenomatch/three_level.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "zenomatch/continuous.hpp"
#include "zenomatch/errors.hpp"

namespace zenomatch {

Hamiltonian3 build_hamiltonian(const ThreeLevelParams& p) {
  p.validate();
  Hamiltonian3 h;
  const double dt = p.Delta + p.delta0;
  h(0, 0) = 0.0;
  h(0, 1) = 0.5 * p.omega;
  h(0, 2) = 0.0;
  h(1, 0) = 0.5 * p.omega;
  h(1, 1) = -p.delta0;
  h(1, 2) = 0.5 * p.Omega;
  h(2, 0) = 0.0;
  h(2, 1) = 0.5 * p.Omega;
  h(2, 2) = complex(-dt, -0.5 * p.Gamma);
  return h;
}

double frequency_scale(const Hamiltonian3& h, double Gamma) {
  double frob2 = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) frob2 += std::norm(h(r, c));
  }
  // Frobenius norm >= spectral radius, so stepping against it keeps the step
  // at or below the |eigenvalue|-based bound.
  return std::max(std::sqrt(frob2), Gamma);
}

namespace {

// Raw-scalar complex state and generator for the hot loop: using
// std::complex multiplications here costs the library's __muldc3 paths and
// blocks vectorization; the step count at experimental parameters is ~1e9.
struct RawState {
  double re[3];
  double im[3];
};

struct RawGenerator {
  // A = -i H / Lambda, row-major.
  double re[3][3];
  double im[3][3];
};

// One classical RK4 step of size h, precomputed as a matrix. For the linear
// autonomous system y' = A y the step is exactly the degree-4 Taylor map
//   M = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24,
// so a step costs one 3x3 matvec instead of four plus the stage combinations.
struct StepMap {
  double re[3][3];
  double im[3][3];
};

StepMap make_rk4_map(const RawGenerator& A, double h) {
  complex b[3][3];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) b[r][c] = h * complex(A.re[r][c], A.im[r][c]);
  }

  // Horner form: M = I + B(I + (B/2)(I + (B/3)(I + B/4))).
  complex p[3][3];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      p[r][c] = 0.25 * b[r][c] + (r == c ? 1.0 : 0.0);
    }
  }
  for (int k = 3; k >= 1; --k) {
    complex next[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        complex acc = r == c ? 1.0 : 0.0;
        for (int j = 0; j < 3; ++j) {
          acc += b[r][j] / static_cast<double>(k) * p[j][c];
        }
        next[r][c] = acc;
      }
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) p[r][c] = next[r][c];
    }
  }

  StepMap m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m.re[r][c] = p[r][c].real();
      m.im[r][c] = p[r][c].imag();
    }
  }
  return m;
}

inline void apply_map(const StepMap& m, RawState& y) {
  double re[3], im[3];
  for (int r = 0; r < 3; ++r) {
    double acc_re = 0.0, acc_im = 0.0;
    for (int c = 0; c < 3; ++c) {
      acc_re += m.re[r][c] * y.re[c] - m.im[r][c] * y.im[c];
      acc_im += m.re[r][c] * y.im[c] + m.im[r][c] * y.re[c];
    }
    re[r] = acc_re;
    im[r] = acc_im;
  }
  for (int i = 0; i < 3; ++i) {
    y.re[i] = re[i];
    y.im[i] = im[i];
  }
}

RawGenerator make_generator(const Hamiltonian3& h, double Lambda) {
  RawGenerator A;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const complex a = complex(0, -1) * h(r, c) / Lambda;
      A.re[r][c] = a.real();
      A.im[r][c] = a.imag();
    }
  }
  return A;
}

RawState to_raw(const StateVector3& s) {
  RawState r;
  for (int i = 0; i < 3; ++i) {
    r.re[i] = s.c[i].real();
    r.im[i] = s.c[i].imag();
  }
  return r;
}

StateVector3 from_raw(const RawState& r) {
  StateVector3 s;
  for (int i = 0; i < 3; ++i) s.c[i] = complex(r.re[i], r.im[i]);
  return s;
}

inline double pop(const RawState& s, int i) {
  return s.re[i] * s.re[i] + s.im[i] * s.im[i];
}

}  // namespace

Trajectory3 propagate(const Hamiltonian3& h, const StateVector3& psi0,
                      const std::vector<double>& t_grid, double Gamma,
                      const PropagateOptions& opt) {
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw std::invalid_argument("time grid must start at 0");
  }
  for (size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing");
    }
  }
  if (opt.steps_per_cycle < 1) {
    throw std::invalid_argument("steps_per_cycle must be >= 1");
  }

  const double Lambda = frequency_scale(h, Gamma);
  const RawGenerator A = make_generator(h, Lambda);
  const double h_max = 2.0 * std::numbers::pi / static_cast<double>(opt.steps_per_cycle);

  Trajectory3 traj;
  traj.t = t_grid;
  traj.p1.reserve(t_grid.size());
  traj.p2.reserve(t_grid.size());
  traj.p3.reserve(t_grid.size());
  traj.p_tot.reserve(t_grid.size());
  traj.states.reserve(t_grid.size());

  RawState y = to_raw(psi0);
  auto record = [&](const RawState& s) {
    const double p1 = pop(s, 0), p2 = pop(s, 1), p3 = pop(s, 2);
    traj.p1.push_back(p1);
    traj.p2.push_back(p2);
    traj.p3.push_back(p3);
    traj.p_tot.push_back(p1 + p2 + p3);
    traj.states.push_back(from_raw(s));
  };
  record(y);

  for (size_t i = 1; i < t_grid.size(); ++i) {
    const double span = (t_grid[i] - t_grid[i - 1]) * Lambda;  // rescaled
    const double n_real = std::ceil(span / h_max);
    if (!(n_real < 9e15)) {
      throw solver_error(
          "step-size underflow: the grid interval needs more RK4 steps than "
          "can be counted; rescale to units where Lambda*t is moderate");
    }
    const long n = std::max(1L, static_cast<long>(n_real));
    const double step = span / static_cast<double>(n);
    const StepMap m = make_rk4_map(A, step);
    for (long k = 0; k < n; ++k) apply_map(m, y);
    record(y);
  }
  return traj;
}

StateVector3 propagate_state(const Hamiltonian3& h, const StateVector3& psi0,
                             double t, double Gamma,
                             const PropagateOptions& opt) {
  if (t == 0.0) return psi0;
  const auto traj = propagate(h, psi0, {0.0, t}, Gamma, opt);
  return traj.states.back();
}

Lifetime3Result lifetime_three_level_full(const ThreeLevelParams& p,
                                          const LifetimeOptions& opt) {
  p.validate();
  if (p.Gamma <= 0.0 || p.Omega <= 0.0) {
    throw never_detected(
        "no decay channel: the coupling laser or the level-3 decay is off");
  }

  const Hamiltonian3 h = build_hamiltonian(p);
  const double Lambda = frequency_scale(h, p.Gamma);
  const RawGenerator A = make_generator(h, Lambda);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(opt.steps_per_cycle);
  const StepMap m = make_rk4_map(A, step);
  const double Gamma_scaled = p.Gamma / Lambda;

  // Everything below runs in rescaled time tau = Lambda*t; the two integrals
  //   I1 = int Gamma p3 dtau          (detected fraction)
  //   It = int tau Gamma p3 dtau      (mean emission time, rescaled)
  // are accumulated with Simpson's rule over pairs of RK4 steps.
  RawState y{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  double tau = 0.0;
  double I1 = 0.0, It = 0.0;
  double f_prev = 0.0, g_prev = 0.0;  // integrands at the last even node

  // Crossing times of two p_tot decades for the tail-rate fit.
  const double mark_hi = 10.0 * opt.p_tot_stop;
  double t_mark_hi = -1.0, t_mark_lo = -1.0;

  long steps = 0;
  double ptot = 1.0;
  while (true) {
    // Two steps per Simpson panel.
    apply_map(m, y);
    const double pm = pop(y, 2);
    const double tau_m = tau + step;
    apply_map(m, y);
    tau += 2.0 * step;
    steps += 2;

    const double p3 = pop(y, 2);
    const double f = Gamma_scaled * p3;
    const double g = tau * Gamma_scaled * p3;
    const double fm = Gamma_scaled * pm;
    const double gm = tau_m * Gamma_scaled * pm;
    I1 += step / 3.0 * (f_prev + 4.0 * fm + f);
    It += step / 3.0 * (g_prev + 4.0 * gm + g);
    f_prev = f;
    g_prev = g;

    const double p_new = pop(y, 0) + pop(y, 1) + p3;
    if (t_mark_hi < 0.0 && p_new < mark_hi) t_mark_hi = tau;
    if (p_new < opt.p_tot_stop) {
      t_mark_lo = tau;
      // Both decades crossed inside one panel: fall back to the panel width,
      // which can only overestimate the (already tiny) tail.
      if (t_mark_hi >= t_mark_lo) t_mark_hi = t_mark_lo - 2.0 * step;
      ptot = p_new;
      break;
    }
    if (tau > opt.max_scaled_time) {
      throw solver_error("lifetime integration exceeded the time budget "
                         "before the population decayed; tail does not converge");
    }
  }

  // Single-exponential tail: Gamma p3 ~ -dp_tot/dtau ~ lam p_tot(T) e^{-lam (tau-T)}.
  const double lam = std::log(10.0) / (t_mark_lo - t_mark_hi);
  if (!(lam > 0.0) || !std::isfinite(lam)) {
    throw solver_error("tail-rate fit failed: population decades not resolved");
  }
  const double tail_I1 = ptot;
  const double tail_It = ptot * (t_mark_lo + 1.0 / lam);

  Lifetime3Result res;
  res.tau3 = (It + tail_It) / Lambda;
  res.detected_fraction = I1 + tail_I1;
  res.integration_time = t_mark_lo / Lambda;
  res.steps = steps;
  return res;
}

double lifetime_three_level(const ThreeLevelParams& p,
                            const LifetimeOptions& opt) {
  return lifetime_three_level_full(p, opt).tau3;
}

ModelDiscrepancy compare_models(const ThreeLevelParams& p,
                                const std::vector<double>& t_grid,
                                const PropagateOptions& opt) {
  const EffectiveParams eff = reduce_to_effective(p);
  const Hamiltonian3 h = build_hamiltonian(p);
  StateVector3 psi0;
  psi0.c[0] = 1.0;
  const Trajectory3 traj = propagate(h, psi0, t_grid, p.Gamma, opt);

  ModelDiscrepancy d;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    const auto [a1, a2] = amplitudes(eff, t_grid[i]);
    d.max_dp1 = std::max(d.max_dp1, std::abs(traj.p1[i] - std::norm(a1)));
    d.max_dp2 = std::max(d.max_dp2, std::abs(traj.p2[i] - std::norm(a2)));
  }
  return d;
}

}  // namespace zenomatch
