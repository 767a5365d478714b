#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zenomatch/params.hpp"

namespace zenomatch {

enum class SweepVariable { gamma_over_omega, s0, delta_t, time };
enum class Spacing { linear, log };

// A one-dimensional parameter sweep. Which fixed parameters are required
// depends on the swept variable:
//   gamma_over_omega : omega, delta (effective model; delta0 := delta)
//   s0               : omega, Gamma, Delta, delta0 (Omega derived per point)
//   delta_t          : omega, delta0 (pulsed scheme per point)
//   time             : omega+gamma+delta (two-level trace) or full
//                      three-level parameters (three-level trace)
struct SweepSpec {
  SweepVariable variable = SweepVariable::gamma_over_omega;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  Spacing spacing = Spacing::linear;

  std::optional<double> omega;   // rad/s
  std::optional<double> Omega;   // rad/s (three-level)
  std::optional<double> Gamma;   // rad/s (three-level)
  std::optional<double> Delta;   // rad/s (three-level)
  std::optional<double> delta0;  // rad/s
  std::optional<double> gamma;   // rad/s (effective)
  std::optional<double> delta;   // rad/s (effective)

  // Any of: tau_c, mean_t, delta_t_approx, delta_t_exact, populations.
  std::vector<std::string> outputs;

  void validate() const;  // count >= 2, min < max, log spacing needs min > 0
};

// Column-oriented numeric table with a JSON metadata record (already
// serialized) carrying the full inputs, code version and preset name --
// enough to reproduce the run bit-exactly with the same build.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::string metadata;  // serialized JSON object

  // Rows where a point raised never_detected; their dependent cells are NaN.
  std::vector<int> never_detected_rows;
};

SweepTable run_sweep(const SweepSpec& spec);

// Round-trips for config files (flat JSON mirroring SweepSpec).
SweepSpec sweep_spec_from_json(const std::string& json_text);
std::string sweep_spec_to_json(const SweepSpec& spec);

enum class Fig6DeltaSign {
  caption,  // Delta = +2*pi*3.18e6 rad/s
  text      // Delta = -20e6 rad/s
};

// Named dataset presets: fig2, fig3, fig4, fig5, fig6-solid, fig6-dashed.
// The sign option only affects fig6-dashed. Throws std::invalid_argument for
// an unknown name. Column layouts are documented in the README.
SweepTable run_preset(const std::string& name,
                      Fig6DeltaSign sign = Fig6DeltaSign::caption);

std::vector<std::string> preset_names();

}  // namespace zenomatch
