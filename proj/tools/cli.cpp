#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zenomatch/zenomatch.hpp"

namespace zenomatch::cli {

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::string out_path;            // empty: write to stdout
  std::string format = "csv";      // csv | json
  std::string units = "angular";   // angular | hertz

  // Frequency-like inputs (Rabi frequencies, rates, detunings) are taken as
  // rad/s in angular mode and multiplied by 2*pi in hertz mode. Times are
  // seconds in both modes; outputs are always rad/s and seconds.
  double freq(double v) const {
    return units == "hertz" ? 2.0 * std::numbers::pi * v : v;
  }
};

// One-record result: a JSON object, or a CSV header row plus one data row.
std::string scalar_payload(const GlobalOpts& g,
                           const std::vector<std::pair<std::string, json>>& kv) {
  if (g.format == "json") {
    json j;
    for (const auto& [k, v] : kv) j[k] = v;
    return j.dump() + "\n";
  }
  std::string header, row;
  for (size_t i = 0; i < kv.size(); ++i) {
    if (i) {
      header += ',';
      row += ',';
    }
    header += kv[i].first;
    const json& v = kv[i].second;
    if (v.is_number_float()) {
      row += io::format_double(v.get<double>());
    } else if (v.is_string()) {
      row += v.get<std::string>();
    } else {
      row += v.dump();
    }
  }
  return header + "\n" + row + "\n";
}

std::string rows_payload(const GlobalOpts& g,
                         const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows,
                         const std::string& csv) {
  if (g.format == "json") {
    json j;
    j["columns"] = columns;
    j["rows"] = rows;
    return j.dump() + "\n";
  }
  return csv;
}

std::string trace_payload(const GlobalOpts& g, const ContinuousTrace& tr) {
  std::vector<std::vector<double>> rows;
  rows.reserve(tr.t.size());
  for (size_t i = 0; i < tr.t.size(); ++i) {
    rows.push_back({tr.t[i], tr.p1[i], tr.p2[i], tr.p_tot[i], tr.W[i]});
  }
  return rows_payload(g, {"t", "p1", "p2", "p_tot", "W"}, rows,
                      io::trace_to_csv(tr));
}

std::string trace_payload(const GlobalOpts& g, const Trajectory3& tr) {
  std::vector<std::vector<double>> rows;
  rows.reserve(tr.t.size());
  for (size_t i = 0; i < tr.t.size(); ++i) {
    rows.push_back({tr.t[i], tr.p1[i], tr.p2[i], tr.p3[i], tr.p_tot[i]});
  }
  return rows_payload(g, {"t", "p1", "p2", "p3", "p_tot"}, rows,
                      io::trace_to_csv(tr));
}

std::string survival_payload(const GlobalOpts& g,
                             const std::vector<SurvivalPoint>& curve) {
  std::vector<std::vector<double>> rows;
  rows.reserve(curve.size());
  for (const auto& p : curve) {
    rows.push_back({static_cast<double>(p.k), p.t, p.p1_exact,
                    p.p1_exponential});
  }
  return rows_payload(g, {"k", "t", "p1_exact", "p1_exponential"}, rows,
                      io::survival_to_csv(curve));
}

std::string match_payload(const GlobalOpts& g, const MatchResult& r) {
  if (g.format == "json") return io::match_to_json(r) + "\n";
  std::string out = "delta_t,iterations,residual,tau_c,mean_t,method\n";
  out += io::format_double(r.delta_t);
  out += ',' + std::to_string(r.iterations);
  out += ',' + io::format_double(r.residual);
  out += ',' + io::format_double(r.tau_c);
  out += ',' + io::format_double(r.mean_t);
  out += ',';
  out += r.method;
  out += '\n';
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw std::invalid_argument("cannot read config file: " + path);
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<double> uniform_grid(double t_max, int points) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t-max must be > 0");
  if (points < 2) throw std::invalid_argument("points must be >= 2");
  std::vector<double> g(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    g[static_cast<size_t>(i)] = t_max * static_cast<double>(i) / (points - 1);
  }
  g.back() = t_max;
  return g;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "zenomatch: detection-time statistics of a driven atom under "
      "continuous or pulsed measurement, and the pulse interval matching "
      "the two"};
  app.name("zenomatch");
  app.set_version_flag("--version", std::string("zenomatch ") + version);
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out_path,
                 "Write the result to this file instead of stdout");
  app.add_option("--format", g.format, "Output format (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--units", g.units,
                 "Unit of frequency-like inputs: angular (rad/s) or hertz "
                 "(values are multiplied by 2*pi); outputs stay in rad/s "
                 "and seconds (default angular)")
      ->check(CLI::IsMember({"angular", "hertz"}));

  std::string payload;

  // ---- continuous ---------------------------------------------------------
  auto* cont = app.add_subcommand(
      "continuous",
      "Mean detection time under continuous measurement; --trace-until "
      "emits the sampled evolution instead");
  cont->fallthrough();
  struct {
    double omega = 0.0, gamma = 0.0, delta = 0.0;
    double trace_until = 0.0;
    int points = 400;
  } co;
  cont->add_option("--omega", co.omega, "1-2 driving Rabi frequency")
      ->required();
  cont->add_option("--gamma", co.gamma, "effective decay rate")->required();
  cont->add_option("--delta", co.delta, "effective detuning (default 0)");
  cont->add_option("--trace-until", co.trace_until,
                   "sample the evolution on [0, T] seconds");
  cont->add_option("--points", co.points,
                   "minimum number of trace samples (default 400)");
  cont->callback([&] {
    const EffectiveParams e =
        make_effective(g.freq(co.omega), g.freq(co.gamma), g.freq(co.delta));
    if (cont->count("--trace-until") > 0) {
      payload = trace_payload(g, sample_trace(e, co.trace_until, co.points));
      return;
    }
    payload = scalar_payload(
        g, {{"omega", e.omega},
            {"gamma", e.gamma},
            {"delta", e.delta},
            {"tau_c", lifetime_continuous(e)},
            {"tau_z", e.tau_Z},
            {"gamma_at_minimum", gamma_at_minimum(e.omega, e.delta)}});
  });

  // ---- pulsed -------------------------------------------------------------
  auto* pul = app.add_subcommand(
      "pulsed",
      "Detection statistics of repeated projective measurements; --survival "
      "emits the survival curve instead");
  pul->fallthrough();
  struct {
    double omega = 0.0, delta0 = 0.0, delta_t = 0.0;
    long survival = 0;
  } po;
  pul->add_option("--omega", po.omega, "1-2 driving Rabi frequency")
      ->required();
  pul->add_option("--delta-t", po.delta_t, "pulse interval, seconds")
      ->required();
  pul->add_option("--delta0", po.delta0, "bare 1-2 detuning (default 0)");
  pul->add_option("--survival", po.survival,
                  "emit the ground-state survival curve for pulses 0..K");
  pul->callback([&] {
    PulseScheme s;
    s.delta_t = po.delta_t;
    s.delta0 = g.freq(po.delta0);
    s.omega = g.freq(po.omega);
    if (pul->count("--survival") > 0) {
      payload = survival_payload(g, survival_curve(s, po.survival));
      return;
    }
    const DetectionDistribution d = detection_distribution(s);
    payload = scalar_payload(g, {{"omega", s.omega},
                                 {"delta0", s.delta0},
                                 {"delta_t", s.delta_t},
                                 {"P2", d.P2},
                                 {"mean_time", d.mean_time},
                                 {"tau_ep", effective_pulsed_lifetime(s)},
                                 {"zeno_regime", zeno_regime_ok(s)}});
  });

  // ---- match --------------------------------------------------------------
  auto* mat = app.add_subcommand(
      "match",
      "Pulse interval delta_t equating the pulsed mean detection time with "
      "the continuous one");
  mat->fallthrough();
  struct {
    double omega = 0.0, gamma = 0.0, delta = 0.0;
    std::string method = "newton";
    std::string derivative = "exact";
    double tol = 1e-10;
    int max_iter = 50;
  } mo;
  mat->add_option("--omega", mo.omega, "1-2 driving Rabi frequency")
      ->required();
  mat->add_option("--gamma", mo.gamma, "effective decay rate")->required();
  mat->add_option("--delta", mo.delta, "effective detuning (default 0)");
  mat->add_option("--method", mo.method,
                  "approx: closed-form interval; newton: solve the implicit "
                  "equation (default newton)")
      ->check(CLI::IsMember({"approx", "newton"}));
  mat->add_option("--tol", mo.tol,
                  "relative residual tolerance for newton (default 1e-10)");
  mat->add_option("--max-iter", mo.max_iter,
                  "iteration budget for newton (default 50)");
  mat->add_option("--derivative", mo.derivative,
                  "P2 derivative used inside newton: the closed form (exact) "
                  "or the short-time approximation (approx); approx can stall "
                  "near the lifetime minimum (default exact)")
      ->check(CLI::IsMember({"approx", "exact"}));
  mat->callback([&] {
    const EffectiveParams e =
        make_effective(g.freq(mo.omega), g.freq(mo.gamma), g.freq(mo.delta));
    MatchResult r;
    if (mo.method == "approx") {
      r.delta_t = pulse_interval_approx(e);
      r.iterations = 0;
      r.tau_c = lifetime_continuous(e);
      r.mean_t = mean_detection_time(matched_scheme(e, r.delta_t));
      r.residual = std::abs(r.mean_t - r.tau_c) / r.tau_c;
      r.method = "approx";
    } else {
      SolveOptions opt;
      opt.tol = mo.tol;
      opt.max_iter = mo.max_iter;
      opt.deriv =
          mo.derivative == "approx" ? DerivMode::approx : DerivMode::exact;
      r = solve_pulse_interval(e, opt);
    }
    payload = match_payload(g, r);
  });

  // ---- gamma-pair ---------------------------------------------------------
  auto* gp = app.add_subcommand(
      "gamma-pair",
      "The weak and strong decay rates sharing a target mean detection time");
  gp->fallthrough();
  struct {
    double omega = 0.0, delta = 0.0, target_tau = 0.0;
  } go;
  gp->add_option("--omega", go.omega, "1-2 driving Rabi frequency")
      ->required();
  gp->add_option("--target-tau", go.target_tau,
                 "target mean detection time, seconds")
      ->required();
  gp->add_option("--delta", go.delta, "effective detuning (default 0)");
  gp->callback([&] {
    const double omega = g.freq(go.omega);
    const double delta = g.freq(go.delta);
    const GammaPair pair = find_gamma_pair(omega, delta, go.target_tau);
    const EffectiveParams weak = make_effective(omega, pair.gamma_weak, delta);
    const EffectiveParams strong =
        make_effective(omega, pair.gamma_strong, delta);
    payload = scalar_payload(
        g, {{"omega", omega},
            {"delta", delta},
            {"target_tau", pair.target_tau},
            {"gamma_weak", pair.gamma_weak},
            {"gamma_strong", pair.gamma_strong},
            {"tau_c_weak", lifetime_continuous(weak)},
            {"tau_c_strong", lifetime_continuous(strong)},
            {"gamma_at_minimum", gamma_at_minimum(omega, delta)}});
  });

  // ---- evolve -------------------------------------------------------------
  auto* evo = app.add_subcommand(
      "evolve",
      "Integrate the three-level dynamics; emits the sampled trajectory, or "
      "the mean emission time with --lifetime");
  evo->fallthrough();
  struct {
    double omega = 0.0, Omega = 0.0, Gamma = 0.0, Delta = 0.0, delta0 = 0.0;
    double s0 = 0.0;
    double t_max = 0.0;
    int points = 1001;
    int steps_per_cycle = 40;
    bool lifetime = false;
    bool calibrate = false;
  } eo;
  evo->add_option("--omega", eo.omega, "1-2 driving Rabi frequency")
      ->required();
  evo->add_option("--Gamma", eo.Gamma, "decay rate of level 3")->required();
  auto* omega_opt =
      evo->add_option("--Omega", eo.Omega, "2-3 coupling Rabi frequency");
  auto* s0_opt = evo->add_option(
      "--s0", eo.s0, "coupling saturation parameter; sets Omega");
  omega_opt->excludes(s0_opt);
  s0_opt->excludes(omega_opt);
  evo->add_option("--Delta", eo.Delta, "2-3 laser detuning (default 0)");
  auto* d0_opt =
      evo->add_option("--delta0", eo.delta0, "bare 1-2 detuning (default 0)");
  auto* cal_opt = evo->add_flag(
      "--calibrate", eo.calibrate,
      "choose delta0 so the effective detuning vanishes (exact calibration)");
  d0_opt->excludes(cal_opt);
  cal_opt->excludes(d0_opt);
  auto* tmax_opt = evo->add_option("--t-max", eo.t_max,
                                   "trajectory horizon, seconds");
  evo->add_option("--points", eo.points,
                  "number of output samples (default 1001)");
  evo->add_option("--steps-per-cycle", eo.steps_per_cycle,
                  "RK4 steps per fastest cycle (default 40)");
  evo->add_flag("--lifetime", eo.lifetime,
                "report the mean emission time instead of a trajectory");
  evo->callback([&] {
    if (omega_opt->count() == 0 && s0_opt->count() == 0) {
      throw std::invalid_argument("evolve needs either --Omega or --s0");
    }
    ThreeLevelParams p;
    p.omega = g.freq(eo.omega);
    p.Gamma = g.freq(eo.Gamma);
    p.Omega = s0_opt->count() > 0
                  ? omega_coupling_from_saturation(p.Gamma, eo.s0)
                  : g.freq(eo.Omega);
    p.Delta = g.freq(eo.Delta);
    p.delta0 = eo.calibrate ? calibrate_delta0(p.Delta, p.Omega, p.Gamma)
                            : g.freq(eo.delta0);

    if (eo.lifetime) {
      LifetimeOptions lopt;
      lopt.steps_per_cycle = eo.steps_per_cycle;
      const Lifetime3Result r = lifetime_three_level_full(p, lopt);
      const EffectiveParams e = reduce_to_effective(p);
      payload = scalar_payload(
          g, {{"omega", p.omega},
              {"Omega", p.Omega},
              {"Gamma", p.Gamma},
              {"Delta", p.Delta},
              {"delta0", p.delta0},
              {"s0", p.saturation()},
              {"tau3", r.tau3},
              {"detected_fraction", r.detected_fraction},
              {"tau_c_effective", lifetime_continuous(e)},
              {"integration_time", r.integration_time},
              {"steps", r.steps}});
      return;
    }
    if (tmax_opt->count() == 0) {
      throw std::invalid_argument(
          "evolve needs --t-max unless --lifetime is given");
    }
    PropagateOptions popt;
    popt.steps_per_cycle = eo.steps_per_cycle;
    StateVector3 psi0;
    psi0.c[0] = 1.0;
    const Trajectory3 traj =
        propagate(build_hamiltonian(p), psi0,
                  uniform_grid(eo.t_max, eo.points), p.Gamma, popt);
    payload = trace_payload(g, traj);
  });

  // ---- sweep --------------------------------------------------------------
  auto* swp = app.add_subcommand(
      "sweep", "Run a parameter sweep described by a flat JSON config file");
  swp->fallthrough();
  std::string config_path;
  swp->add_option("--config", config_path,
                  "JSON file with variable/min/max/count plus fixed "
                  "parameters and outputs")
      ->required();
  swp->callback([&] {
    const SweepSpec spec = sweep_spec_from_json(read_text_file(config_path));
    const SweepTable table = run_sweep(spec);
    payload = g.format == "json" ? io::to_json(table) + "\n" : io::to_csv(table);
  });

  // ---- preset -------------------------------------------------------------
  auto* pre = app.add_subcommand(
      "preset", "Emit one of the built-in datasets: fig2, fig3, fig4, fig5, "
                "fig6-solid, fig6-dashed");
  pre->fallthrough();
  std::string preset_name;
  std::string delta_sign = "caption";
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_option("--delta-sign", delta_sign,
                  "sign convention of the 2-3 detuning for fig6-dashed: "
                  "caption (+2*pi*3.18 MHz) or text (-20e6 rad/s)")
      ->check(CLI::IsMember({"caption", "text"}));
  pre->callback([&] {
    const Fig6DeltaSign sign = delta_sign == "text" ? Fig6DeltaSign::text
                                                    : Fig6DeltaSign::caption;
    const SweepTable table = run_preset(preset_name, sign);
    payload = g.format == "json" ? io::to_json(table) + "\n" : io::to_csv(table);
  });

  // ---- parse + dispatch ---------------------------------------------------
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  } catch (const non_convergence& e) {
    err << "error: " << e.what() << " (best delta_t "
        << io::format_double(e.best_value) << ", residual "
        << io::format_double(e.best_residual) << " after " << e.iterations
        << " iterations)\n";
    return 3;
  } catch (const solver_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const never_detected& e) {
    err << "error: never detected: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (!g.out_path.empty()) {
    try {
      io::write_file(g.out_path, payload);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  } else {
    out << payload;
  }
  return 0;
}

}  // namespace zenomatch::cli
