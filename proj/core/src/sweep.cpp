#include "zenomatch/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "zenomatch/continuous.hpp"
#include "zenomatch/errors.hpp"
#include "zenomatch/matcher.hpp"
#include "zenomatch/pulsed.hpp"
#include "zenomatch/three_level.hpp"
#include "zenomatch/version.hpp"

namespace zenomatch {

namespace {

using nlohmann::json;

const double nan_cell = std::numeric_limits<double>::quiet_NaN();

std::vector<double> make_grid(double lo, double hi, int n, Spacing spacing) {
  std::vector<double> g(static_cast<size_t>(n));
  if (spacing == Spacing::log) {
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < n; ++i) {
      g[static_cast<size_t>(i)] =
          std::exp(la + (lb - la) * static_cast<double>(i) / (n - 1));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      g[static_cast<size_t>(i)] =
          lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
  }
  g.front() = lo;  // endpoints exact, not round-tripped through exp/log
  g.back() = hi;
  return g;
}

double require_param(const std::optional<double>& v, const char* name,
                     const char* variable) {
  if (!v) {
    throw std::invalid_argument(std::string("sweep over ") + variable +
                                " requires parameter '" + name + "'");
  }
  return *v;
}

bool wants(const std::vector<std::string>& outputs, const char* name) {
  return std::find(outputs.begin(), outputs.end(), name) != outputs.end();
}

void check_outputs(const std::vector<std::string>& outputs,
                   const std::vector<std::string>& allowed,
                   const char* variable) {
  for (const auto& o : outputs) {
    if (std::find(allowed.begin(), allowed.end(), o) == allowed.end()) {
      std::string msg = std::string("output '") + o +
                        "' is not available for a sweep over " + variable +
                        "; available:";
      for (const auto& a : allowed) msg += " " + a;
      throw std::invalid_argument(msg);
    }
  }
}

const char* variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::gamma_over_omega: return "gamma_over_omega";
    case SweepVariable::s0: return "s0";
    case SweepVariable::delta_t: return "delta_t";
    case SweepVariable::time: return "time";
  }
  throw std::invalid_argument("unknown sweep variable");
}

const char* spacing_name(Spacing s) {
  return s == Spacing::log ? "log" : "linear";
}

json spec_to_json_obj(const SweepSpec& spec) {
  json j;
  j["variable"] = variable_name(spec.variable);
  j["min"] = spec.min;
  j["max"] = spec.max;
  j["count"] = spec.count;
  j["spacing"] = spacing_name(spec.spacing);
  auto put = [&j](const char* name, const std::optional<double>& v) {
    if (v) j[name] = *v;
  };
  put("omega", spec.omega);
  put("Omega", spec.Omega);
  put("Gamma", spec.Gamma);
  put("Delta", spec.Delta);
  put("delta0", spec.delta0);
  put("gamma", spec.gamma);
  put("delta", spec.delta);
  if (!spec.outputs.empty()) j["outputs"] = spec.outputs;
  return j;
}

std::string make_metadata(const json& body) {
  json meta = body;
  meta["generator"] = std::string("zenomatch ") + version;
  return meta.dump();
}

// Evaluates one cell, converting a never_detected signal into a NaN cell and
// marking the row.
template <typename F>
double cell(F&& f, bool& row_never_detected) {
  try {
    return f();
  } catch (const never_detected&) {
    row_never_detected = true;
    return nan_cell;
  }
}

SweepTable sweep_effective(const SweepSpec& spec,
                           const std::vector<std::string>& outputs) {
  const char* vn = variable_name(spec.variable);
  check_outputs(outputs,
                spec.variable == SweepVariable::s0
                    ? std::vector<std::string>{"tau_c", "mean_t",
                                               "delta_t_approx",
                                               "delta_t_exact", "Omega",
                                               "gamma", "delta"}
                    : std::vector<std::string>{"tau_c", "mean_t",
                                               "delta_t_approx",
                                               "delta_t_exact"},
                vn);

  const double omega = require_param(spec.omega, "omega", vn);
  double delta = 0.0, Gamma = 0.0, Delta = 0.0, delta0 = 0.0;
  if (spec.variable == SweepVariable::gamma_over_omega) {
    delta = require_param(spec.delta, "delta", vn);
    if (!(spec.min > 0.0)) {
      throw std::invalid_argument("gamma_over_omega sweep needs min > 0");
    }
  } else {
    Gamma = require_param(spec.Gamma, "Gamma", vn);
    Delta = require_param(spec.Delta, "Delta", vn);
    delta0 = require_param(spec.delta0, "delta0", vn);
    if (!(spec.min > 0.0)) {
      throw std::invalid_argument("s0 sweep needs min > 0");
    }
  }

  const bool exact_dt = wants(outputs, "delta_t_exact");
  const auto grid = make_grid(spec.min, spec.max, spec.count, spec.spacing);

  SweepTable table;
  table.columns.push_back(vn);
  for (const auto& o : outputs) table.columns.push_back(o);
  table.rows.reserve(grid.size());

  for (size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    EffectiveParams e;
    double Om = 0.0;
    if (spec.variable == SweepVariable::gamma_over_omega) {
      e = make_effective(omega, x * omega, delta);
    } else {
      Om = omega_coupling_from_saturation(Gamma, x);
      ThreeLevelParams p;
      p.omega = omega;
      p.Omega = Om;
      p.Gamma = Gamma;
      p.Delta = Delta;
      p.delta0 = delta0;
      e = reduce_to_effective(p);
    }

    bool nd = false;
    // The mean detection time is reported at the exact matched interval when
    // one was requested, otherwise at the closed-form interval.
    double dt_for_mean = nan_cell;
    double dt_exact = nan_cell;
    if (exact_dt) {
      dt_exact = solve_pulse_interval(e).delta_t;
      dt_for_mean = dt_exact;
    } else if (wants(outputs, "mean_t")) {
      dt_for_mean = pulse_interval_approx(e);
    }

    std::vector<double> row;
    row.reserve(table.columns.size());
    row.push_back(x);
    for (const auto& o : outputs) {
      if (o == "tau_c") {
        row.push_back(cell([&] { return lifetime_continuous(e); }, nd));
      } else if (o == "mean_t") {
        row.push_back(cell(
            [&] { return mean_detection_time(matched_scheme(e, dt_for_mean)); },
            nd));
      } else if (o == "delta_t_approx") {
        row.push_back(cell([&] { return pulse_interval_approx(e); }, nd));
      } else if (o == "delta_t_exact") {
        row.push_back(dt_exact);
      } else if (o == "Omega") {
        row.push_back(Om);
      } else if (o == "gamma") {
        row.push_back(e.gamma);
      } else if (o == "delta") {
        row.push_back(e.delta);
      }
    }
    if (nd) table.never_detected_rows.push_back(static_cast<int>(i));
    table.rows.push_back(std::move(row));
  }

  json meta;
  meta["spec"] = spec_to_json_obj(spec);
  table.metadata = make_metadata(meta);
  return table;
}

SweepTable sweep_delta_t(const SweepSpec& spec,
                         const std::vector<std::string>& outputs) {
  const char* vn = variable_name(spec.variable);
  check_outputs(outputs, {"mean_t", "P2"}, vn);
  const double omega = require_param(spec.omega, "omega", vn);
  const double delta0 = require_param(spec.delta0, "delta0", vn);
  if (!(spec.min > 0.0)) {
    throw std::invalid_argument("delta_t sweep needs min > 0");
  }

  const auto grid = make_grid(spec.min, spec.max, spec.count, spec.spacing);
  SweepTable table;
  table.columns.push_back("delta_t");
  for (const auto& o : outputs) table.columns.push_back(o);
  table.rows.reserve(grid.size());

  for (size_t i = 0; i < grid.size(); ++i) {
    PulseScheme s;
    s.delta_t = grid[i];
    s.delta0 = delta0;
    s.omega = omega;
    bool nd = false;
    std::vector<double> row{grid[i]};
    for (const auto& o : outputs) {
      if (o == "mean_t") {
        row.push_back(cell([&] { return mean_detection_time(s); }, nd));
      } else if (o == "P2") {
        row.push_back(excitation_probability(s));
      }
    }
    if (nd) table.never_detected_rows.push_back(static_cast<int>(i));
    table.rows.push_back(std::move(row));
  }

  json meta;
  meta["spec"] = spec_to_json_obj(spec);
  table.metadata = make_metadata(meta);
  return table;
}

SweepTable sweep_time(const SweepSpec& spec,
                      const std::vector<std::string>& outputs) {
  const char* vn = variable_name(spec.variable);
  check_outputs(outputs, {"populations"}, vn);
  if (!(spec.min >= 0.0)) {
    throw std::invalid_argument("time sweep needs min >= 0");
  }

  const bool three_level =
      spec.Omega.has_value() || spec.Gamma.has_value() || spec.Delta.has_value();
  if (three_level && spec.gamma.has_value()) {
    throw std::invalid_argument(
        "time sweep: give either the effective rate gamma or the three-level "
        "parameters Omega/Gamma/Delta, not both");
  }

  const auto grid = make_grid(spec.min, spec.max, spec.count, spec.spacing);
  SweepTable table;
  json meta;
  meta["spec"] = spec_to_json_obj(spec);

  if (three_level) {
    ThreeLevelParams p;
    p.omega = require_param(spec.omega, "omega", vn);
    p.Omega = require_param(spec.Omega, "Omega", vn);
    p.Gamma = require_param(spec.Gamma, "Gamma", vn);
    p.Delta = require_param(spec.Delta, "Delta", vn);
    p.delta0 = require_param(spec.delta0, "delta0", vn);

    std::vector<double> t_grid = grid;
    const bool prepended = t_grid.front() > 0.0;
    if (prepended) t_grid.insert(t_grid.begin(), 0.0);
    StateVector3 psi0;
    psi0.c[0] = 1.0;
    const Trajectory3 traj =
        propagate(build_hamiltonian(p), psi0, t_grid, p.Gamma);

    table.columns = {"t", "p1", "p2", "p3", "p_tot"};
    const size_t first = prepended ? 1 : 0;
    for (size_t i = first; i < t_grid.size(); ++i) {
      table.rows.push_back(
          {traj.t[i], traj.p1[i], traj.p2[i], traj.p3[i], traj.p_tot[i]});
    }
    meta["model"] = "three_level";
  } else {
    EffectiveParams e =
        make_effective(require_param(spec.omega, "omega", vn),
                       require_param(spec.gamma, "gamma", vn),
                       require_param(spec.delta, "delta", vn));
    table.columns = {"t", "p1", "p2", "p_tot", "W"};
    for (const double t : grid) {
      const auto [a1, a2] = amplitudes(e, t);
      const double p1 = std::norm(a1), p2 = std::norm(a2);
      table.rows.push_back({t, p1, p2, p1 + p2, e.gamma * p2});
    }
    meta["model"] = "effective_two_level";
  }

  table.metadata = make_metadata(meta);
  return table;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

SweepTable preset_fig2() {
  const double omega = 1.0;
  const std::array<double, 3> det{0.0, 1.0, 3.0};
  const auto grid = make_grid(0.05, 50.0, 200, Spacing::log);

  SweepTable table;
  table.columns = {"gamma_over_omega", "tau_c_delta_0", "tau_c_delta_1",
                   "tau_c_delta_3"};
  for (const double g : grid) {
    std::vector<double> row{g};
    for (const double d : det) {
      row.push_back(lifetime_continuous(make_effective(omega, g * omega, d)));
    }
    table.rows.push_back(std::move(row));
  }

  json meta;
  meta["preset"] = "fig2";
  meta["parameters"] = {{"omega", omega},
                        {"delta_over_omega", {0.0, 1.0, 3.0}},
                        {"gamma_over_omega_min", 0.05},
                        {"gamma_over_omega_max", 50.0},
                        {"count", 200},
                        {"spacing", "log"}};
  table.metadata = make_metadata(meta);
  return table;
}

SweepTable preset_fig3() {
  const double omega = 1.0;
  const double delta = 0.0;
  const double target_tau = 20.1;  // tau_c at gamma/omega = 0.1 and 20
  const GammaPair pair = find_gamma_pair(omega, delta, target_tau);
  const EffectiveParams weak = make_effective(omega, pair.gamma_weak, delta);
  const EffectiveParams strong = make_effective(omega, pair.gamma_strong, delta);

  const double t_max = 4.0 * target_tau;
  // Common grid dense enough for the faster population oscillation.
  const double osc = std::max(2.0 * std::abs(complex_root_R(weak).imag()),
                              2.0 * std::abs(complex_root_R(strong).imag()));
  int n = 401;
  if (osc > 0.0) {
    n = std::max(
        n, static_cast<int>(
               std::ceil(40.0 * t_max * osc / (2.0 * std::numbers::pi))) +
               1);
  }
  const auto grid = make_grid(0.0, t_max, n, Spacing::linear);

  SweepTable table;
  table.columns = {"t",         "p1_weak",   "p2_weak", "p_tot_weak",
                   "W_weak",    "p1_strong", "p2_strong", "p_tot_strong",
                   "W_strong"};
  for (const double t : grid) {
    const auto [w1, w2] = amplitudes(weak, t);
    const auto [s1, s2] = amplitudes(strong, t);
    const double wp1 = std::norm(w1), wp2 = std::norm(w2);
    const double sp1 = std::norm(s1), sp2 = std::norm(s2);
    table.rows.push_back({t, wp1, wp2, wp1 + wp2, weak.gamma * wp2, sp1, sp2,
                          sp1 + sp2, strong.gamma * sp2});
  }

  json meta;
  meta["preset"] = "fig3";
  meta["parameters"] = {{"omega", omega},
                        {"delta", delta},
                        {"target_tau", target_tau},
                        {"gamma_weak", pair.gamma_weak},
                        {"gamma_strong", pair.gamma_strong},
                        {"tau_c_weak", lifetime_continuous(weak)},
                        {"tau_c_strong", lifetime_continuous(strong)},
                        {"t_max", t_max},
                        {"count", n}};
  table.metadata = make_metadata(meta);
  return table;
}

// Shared grid and parameters of the two matched-interval figures: detuned
// effective atom, delta = delta0 = 3 omega.
SweepTable preset_fig45(bool with_newton) {
  const double omega = 1.0;
  const double delta = 3.0;
  const auto grid = make_grid(0.5, 20.0, 160, Spacing::log);

  SweepTable table;
  table.columns = {"gamma_over_omega", "tau_c", "delta_t_approx",
                   "mean_t_approx"};
  if (with_newton) {
    table.columns.push_back("mean_t_newton1");
    table.columns.push_back("mean_t_newton3");
  }

  for (size_t i = 0; i < grid.size(); ++i) {
    const double g = grid[i];
    const EffectiveParams e = make_effective(omega, g * omega, delta);
    const double dt0 = pulse_interval_approx(e);
    bool nd = false;
    std::vector<double> row{g, lifetime_continuous(e), dt0,
                            cell(
                                [&] {
                                  return mean_detection_time(
                                      matched_scheme(e, dt0));
                                },
                                nd)};
    if (with_newton) {
      const double dt1 = newton_step(e, dt0);
      const double dt2 = newton_step(e, dt1);
      const double dt3 = newton_step(e, dt2);
      row.push_back(cell(
          [&] { return mean_detection_time(matched_scheme(e, dt1)); }, nd));
      row.push_back(cell(
          [&] { return mean_detection_time(matched_scheme(e, dt3)); }, nd));
    }
    if (nd) table.never_detected_rows.push_back(static_cast<int>(i));
    table.rows.push_back(std::move(row));
  }

  json meta;
  meta["preset"] = with_newton ? "fig5" : "fig4";
  meta["parameters"] = {{"omega", omega},
                        {"delta", delta},
                        {"delta0", delta},
                        {"gamma_over_omega_min", 0.5},
                        {"gamma_over_omega_max", 20.0},
                        {"count", 160},
                        {"spacing", "log"}};
  table.metadata = make_metadata(meta);
  return table;
}

// Experimental-parameter presets: lifetime against saturation s0 for the
// resonant (solid) and detuned, calibrated (dashed) configurations.
SweepTable preset_fig6(bool dashed, Fig6DeltaSign sign) {
  const double omega = 2.0 * std::numbers::pi * 48.5;  // rad/s
  const double Gamma = 2.0 * std::numbers::pi * 1.74e6;
  const double Delta = !dashed ? 0.0
                       : (sign == Fig6DeltaSign::caption
                              ? 2.0 * std::numbers::pi * 3.18e6
                              : -20.0e6);
  const auto grid = make_grid(1e-5, 0.1, 121, Spacing::log);

  SweepTable table;
  table.columns = {"s0", "Omega", "gamma", "delta0", "delta", "tau_c",
                   "tau_line"};
  if (dashed) {
    table.columns.insert(table.columns.begin() + 4, "delta0_approx");
  }

  for (const double s0 : grid) {
    const double Om = omega_coupling_from_saturation(Gamma, s0);
    double delta0 = 0.0, delta0_approx = 0.0;
    if (dashed) {
      delta0 = calibrate_delta0(Delta, Om, Gamma, CalibrationMode::exact);
      delta0_approx =
          calibrate_delta0(Delta, Om, Gamma, CalibrationMode::approx);
    }
    ThreeLevelParams p;
    p.omega = omega;
    p.Omega = Om;
    p.Gamma = Gamma;
    p.Delta = Delta;
    p.delta0 = delta0;
    const EffectiveParams e = reduce_to_effective(p);
    std::vector<double> row{s0, Om, e.gamma, delta0};
    if (dashed) row.push_back(delta0_approx);
    row.push_back(e.delta);
    row.push_back(lifetime_continuous(e));
    row.push_back(e.gamma / (omega * omega));  // strong-measurement asymptote
    table.rows.push_back(std::move(row));
  }

  json meta;
  meta["preset"] = dashed ? "fig6-dashed" : "fig6-solid";
  meta["parameters"] = {{"omega", omega},
                        {"Gamma", Gamma},
                        {"Delta", Delta},
                        {"s0_min", 1e-5},
                        {"s0_max", 0.1},
                        {"count", 121},
                        {"spacing", "log"}};
  if (dashed) {
    meta["parameters"]["delta_sign"] =
        sign == Fig6DeltaSign::caption ? "caption" : "text";
    meta["parameters"]["calibration"] = "exact";
  }
  table.metadata = make_metadata(meta);
  return table;
}

}  // namespace

void SweepSpec::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max)) {
    throw std::invalid_argument("sweep bounds must be finite");
  }
  if (!(min < max)) {
    throw std::invalid_argument("sweep needs min < max");
  }
  if (count < 2) {
    throw std::invalid_argument("sweep needs count >= 2");
  }
  if (spacing == Spacing::log && !(min > 0.0)) {
    throw std::invalid_argument("log spacing needs min > 0");
  }
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::string> outputs = spec.outputs;
  if (outputs.empty()) {
    switch (spec.variable) {
      case SweepVariable::gamma_over_omega:
      case SweepVariable::s0:
        outputs = {"tau_c"};
        break;
      case SweepVariable::delta_t:
        outputs = {"mean_t"};
        break;
      case SweepVariable::time:
        outputs = {"populations"};
        break;
    }
  }
  switch (spec.variable) {
    case SweepVariable::gamma_over_omega:
    case SweepVariable::s0:
      return sweep_effective(spec, outputs);
    case SweepVariable::delta_t:
      return sweep_delta_t(spec, outputs);
    case SweepVariable::time:
      return sweep_time(spec, outputs);
  }
  throw std::invalid_argument("unknown sweep variable");
}

SweepSpec sweep_spec_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid sweep config: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("sweep config must be a JSON object");
  }

  SweepSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "variable") {
        const std::string v = value.get<std::string>();
        if (v == "gamma_over_omega") {
          spec.variable = SweepVariable::gamma_over_omega;
        } else if (v == "s0") {
          spec.variable = SweepVariable::s0;
        } else if (v == "delta_t") {
          spec.variable = SweepVariable::delta_t;
        } else if (v == "time") {
          spec.variable = SweepVariable::time;
        } else {
          throw std::invalid_argument("unknown sweep variable '" + v + "'");
        }
      } else if (key == "min") {
        spec.min = value.get<double>();
      } else if (key == "max") {
        spec.max = value.get<double>();
      } else if (key == "count") {
        spec.count = value.get<int>();
      } else if (key == "spacing") {
        const std::string s = value.get<std::string>();
        if (s == "linear") {
          spec.spacing = Spacing::linear;
        } else if (s == "log") {
          spec.spacing = Spacing::log;
        } else {
          throw std::invalid_argument("unknown spacing '" + s + "'");
        }
      } else if (key == "omega") {
        spec.omega = value.get<double>();
      } else if (key == "Omega") {
        spec.Omega = value.get<double>();
      } else if (key == "Gamma") {
        spec.Gamma = value.get<double>();
      } else if (key == "Delta") {
        spec.Delta = value.get<double>();
      } else if (key == "delta0") {
        spec.delta0 = value.get<double>();
      } else if (key == "gamma") {
        spec.gamma = value.get<double>();
      } else if (key == "delta") {
        spec.delta = value.get<double>();
      } else if (key == "outputs") {
        spec.outputs = value.get<std::vector<std::string>>();
      } else {
        throw std::invalid_argument("unknown sweep config key '" + key + "'");
      }
    }
  } catch (const json::type_error& e) {
    throw std::invalid_argument(std::string("invalid sweep config: ") +
                                e.what());
  }
  if (!j.contains("variable") || !j.contains("min") || !j.contains("max") ||
      !j.contains("count")) {
    throw std::invalid_argument(
        "sweep config requires variable, min, max and count");
  }
  return spec;
}

std::string sweep_spec_to_json(const SweepSpec& spec) {
  return spec_to_json_obj(spec).dump();
}

SweepTable run_preset(const std::string& name, Fig6DeltaSign sign) {
  if (name == "fig2") return preset_fig2();
  if (name == "fig3") return preset_fig3();
  if (name == "fig4") return preset_fig45(false);
  if (name == "fig5") return preset_fig45(true);
  if (name == "fig6-solid") return preset_fig6(false, sign);
  if (name == "fig6-dashed") return preset_fig6(true, sign);
  std::string msg = "unknown preset '" + name + "'; available:";
  for (const auto& p : preset_names()) msg += " " + p;
  throw std::invalid_argument(msg);
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6-solid", "fig6-dashed"};
}

}  // namespace zenomatch
