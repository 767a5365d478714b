#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "zenomatch/zenomatch.hpp"

namespace {

using namespace zenomatch;

void BM_amplitudes(benchmark::State& state) {
  const EffectiveParams e = make_effective(1.0, 5.0, 3.0);
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(amplitudes(e, t));
  }
}
BENCHMARK(BM_amplitudes);

void BM_lifetime_closed(benchmark::State& state) {
  const EffectiveParams e = make_effective(1.0, 5.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lifetime_continuous(e));
  }
}
BENCHMARK(BM_lifetime_closed);

void BM_lifetime_quadrature(benchmark::State& state) {
  const EffectiveParams e = make_effective(1.0, 5.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lifetime_quadrature_oracle(e));
  }
}
BENCHMARK(BM_lifetime_quadrature);

void BM_solve_pulse_interval(benchmark::State& state) {
  const EffectiveParams e =
      make_effective(1.0, static_cast<double>(state.range(0)), 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_pulse_interval(e));
  }
}
BENCHMARK(BM_solve_pulse_interval)->Arg(2)->Arg(20);

void BM_rk4_propagate(benchmark::State& state) {
  // Per-step cost of the three-level integrator at experiment-like rates.
  ThreeLevelParams p;
  p.omega = 2.0 * std::numbers::pi * 48.5;
  p.Gamma = 2.0 * std::numbers::pi * 1.74e6;
  p.Omega = omega_coupling_from_saturation(p.Gamma, 1e-3);
  const Hamiltonian3 h = build_hamiltonian(p);
  const double Lambda = frequency_scale(h, p.Gamma);
  const double t_end = 2.0 * std::numbers::pi / Lambda * 1000.0;  // 1000 cycles
  StateVector3 psi0;
  psi0.c[0] = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_state(h, psi0, t_end, p.Gamma));
  }
  state.SetItemsProcessed(state.iterations() * 40000);  // RK4 steps
}
BENCHMARK(BM_rk4_propagate);

}  // namespace

BENCHMARK_MAIN();
