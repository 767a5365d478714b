#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "zenomatch/zenomatch.hpp"

using namespace zenomatch;
using nlohmann::json;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "zenomatch");
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (const char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  return vals;
}

int column_index(const SweepTable& t, const std::string& name) {
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("zenomatch_test_" + name);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sweep configs
// ---------------------------------------------------------------------------

TEST_CASE("sweep config round-trips through JSON") {
  SweepSpec spec;
  spec.variable = SweepVariable::s0;
  spec.min = 1e-4;
  spec.max = 0.1;
  spec.count = 11;
  spec.spacing = Spacing::log;
  spec.omega = 304.7;
  spec.Gamma = 1.1e7;
  spec.Delta = 2e7;
  spec.delta0 = 700.0;
  spec.outputs = {"tau_c", "gamma"};

  const SweepSpec back = sweep_spec_from_json(sweep_spec_to_json(spec));
  CHECK(back.variable == spec.variable);
  CHECK(back.min == spec.min);
  CHECK(back.max == spec.max);
  CHECK(back.count == spec.count);
  CHECK(back.spacing == spec.spacing);
  CHECK(back.omega == spec.omega);
  CHECK(back.Gamma == spec.Gamma);
  CHECK(back.Delta == spec.Delta);
  CHECK(back.delta0 == spec.delta0);
  CHECK_FALSE(back.Omega.has_value());
  CHECK_FALSE(back.gamma.has_value());
  CHECK(back.outputs == spec.outputs);
}

TEST_CASE("sweep config rejects anything it does not understand") {
  const char* cases[] = {
      "{not json",                                                   // syntax
      "42",                                                          // not an object
      R"({"variable":"time","min":0,"max":1,"count":2,"omgea":1})",  // typo'd key
      R"({"variable":"frequency","min":0,"max":1,"count":2})",       // bad variable
      R"({"variable":"time","min":0,"max":1,"count":2,"spacing":"cubic"})",
      R"({"variable":"time","min":0,"max":1})",                      // missing count
      R"({"min":0,"max":1,"count":2})",                              // missing variable
      R"({"variable":"time","min":"zero","max":1,"count":2})",       // type error
  };
  for (const char* text : cases) {
    CAPTURE(text);
    CHECK_THROWS_AS(sweep_spec_from_json(text), std::invalid_argument);
  }
}

TEST_CASE("sweep bounds validation") {
  SweepSpec spec;
  spec.variable = SweepVariable::delta_t;
  spec.omega = 1.0;
  spec.delta0 = 0.0;
  spec.min = 0.1;
  spec.max = 1.0;
  spec.count = 5;

  SUBCASE("min must be below max") {
    spec.min = 2.0;
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  }
  SUBCASE("count of at least 2") {
    spec.count = 1;
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  }
  SUBCASE("log spacing needs a positive start") {
    spec.min = 0.0;
    spec.spacing = Spacing::log;
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  }
  SUBCASE("bounds must be finite") {
    spec.max = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
  }
}

// ---------------------------------------------------------------------------
// run_sweep semantics
// ---------------------------------------------------------------------------

TEST_CASE("gamma_over_omega sweep reproduces direct library calls") {
  SweepSpec spec;
  spec.variable = SweepVariable::gamma_over_omega;
  spec.min = 0.5;
  spec.max = 5.0;
  spec.count = 10;
  spec.spacing = Spacing::log;
  spec.omega = 1.0;
  spec.delta = 0.0;
  spec.outputs = {"tau_c", "delta_t_approx", "delta_t_exact", "mean_t"};

  const SweepTable t = run_sweep(spec);
  CHECK(t.columns == std::vector<std::string>{"gamma_over_omega", "tau_c",
                                              "delta_t_approx", "delta_t_exact",
                                              "mean_t"});
  REQUIRE(t.rows.size() == 10);
  CHECK(t.rows.front()[0] == 0.5);  // endpoints exact despite log spacing
  CHECK(t.rows.back()[0] == 5.0);
  CHECK(t.never_detected_rows.empty());

  for (const auto& row : t.rows) {
    const EffectiveParams e = make_effective(1.0, row[0], 0.0);
    CHECK(row[1] == lifetime_continuous(e));
    CHECK(row[2] == pulse_interval_approx(e));
    CHECK(row[3] == doctest::Approx(solve_pulse_interval(e).delta_t)
                        .epsilon(1e-12));
    // mean_t is evaluated at the exact interval when one was requested
    CHECK(std::abs(row[4] - row[1]) / row[1] <= 1e-10);
  }

  const json meta = json::parse(t.metadata);
  CHECK(meta["spec"]["variable"] == "gamma_over_omega");
  CHECK(meta["spec"]["count"] == 10);
  CHECK(meta["generator"].get<std::string>().rfind("zenomatch ", 0) == 0);

  SUBCASE("missing fixed parameter") {
    SweepSpec bad = spec;
    bad.delta.reset();
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
  }
  SUBCASE("output not available for this variable") {
    SweepSpec bad = spec;
    bad.outputs = {"populations"};
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
  }
  SUBCASE("default output is tau_c") {
    SweepSpec d = spec;
    d.outputs.clear();
    const SweepTable td = run_sweep(d);
    CHECK(td.columns ==
          std::vector<std::string>{"gamma_over_omega", "tau_c"});
  }
}

TEST_CASE("delta_t sweep marks never-detected points with NaN cells") {
  // The first grid point is pinned to min, which we place exactly on a node
  // of the far-detuned Rabi oscillation: P2 underflows to zero there.
  const double delta0 = 1e154;
  const double node = 2.0 * std::numbers::pi / std::sqrt(1.0 + delta0 * delta0);

  SweepSpec spec;
  spec.variable = SweepVariable::delta_t;
  spec.min = node;
  spec.max = 1.0;
  spec.count = 3;
  spec.spacing = Spacing::log;
  spec.omega = 1.0;
  spec.delta0 = delta0;
  spec.outputs = {"mean_t", "P2"};

  const SweepTable t = run_sweep(spec);
  CHECK(t.columns == std::vector<std::string>{"delta_t", "mean_t", "P2"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.never_detected_rows == std::vector<int>{0});
  CHECK(std::isnan(t.rows[0][1]));
  CHECK(t.rows[0][2] == 0.0);
  CHECK(std::isfinite(t.rows[1][1]));
  // At delta_t = 1 the mean may overflow to inf (P2 is subnormal at this
  // detuning); only dark rows are NaN-marked.
  CHECK(!std::isnan(t.rows[2][1]));

  SUBCASE("NaN cells serialize as 'nan' in CSV and null in JSON") {
    const std::string csv = io::to_csv(t);
    const auto ls = lines_of(csv);
    REQUIRE(ls.size() == 5);  // metadata, header, 3 rows
    CHECK(ls[0][0] == '#');
    CHECK(ls[1] == "delta_t,mean_t,P2");
    CHECK(ls[2].find("nan") != std::string::npos);

    const json j = json::parse(io::to_json(t));
    CHECK(j["rows"][0][1].is_null());
    CHECK(j["rows"][1][1].is_number());
    CHECK(j["never_detected_rows"] == json::array({0}));
    CHECK(j["columns"][0] == "delta_t");
    CHECK(j["metadata"]["spec"]["variable"] == "delta_t");
  }
}

TEST_CASE("time sweep: effective two-level trace") {
  SweepSpec spec;
  spec.variable = SweepVariable::time;
  spec.min = 0.0;
  spec.max = 5.0;
  spec.count = 6;
  spec.omega = 1.0;
  spec.gamma = 2.0;
  spec.delta = 0.0;

  const SweepTable t = run_sweep(spec);
  CHECK(t.columns == std::vector<std::string>{"t", "p1", "p2", "p_tot", "W"});
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[0] == std::vector<double>{0.0, 1.0, 0.0, 1.0, 0.0});
  for (const auto& row : t.rows) {
    CHECK(row[3] == doctest::Approx(row[1] + row[2]).epsilon(1e-15));
    CHECK(row[4] == doctest::Approx(2.0 * row[2]).epsilon(1e-15));
  }
  CHECK(json::parse(t.metadata)["model"] == "effective_two_level");

  SUBCASE("missing gamma") {
    SweepSpec bad = spec;
    bad.gamma.reset();
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
  }
  SUBCASE("negative start time") {
    SweepSpec bad = spec;
    bad.min = -1.0;
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
  }
}

TEST_CASE("time sweep: three-level trace") {
  SweepSpec spec;
  spec.variable = SweepVariable::time;
  spec.min = 0.5;  // deliberately not starting at 0
  spec.max = 2.0;
  spec.count = 4;
  spec.omega = 1.0;
  spec.Omega = 2.0;
  spec.Gamma = 4.0;
  spec.Delta = 0.0;
  spec.delta0 = 0.0;

  const SweepTable t = run_sweep(spec);
  CHECK(t.columns == std::vector<std::string>{"t", "p1", "p2", "p3", "p_tot"});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows.front()[0] == 0.5);  // the internal t=0 anchor is not emitted
  CHECK(t.rows.back()[0] == 2.0);
  for (const auto& row : t.rows) {
    CHECK(row[4] < 1.0);  // norm has decayed by t >= 0.5
    CHECK(row[4] == doctest::Approx(row[1] + row[2] + row[3]).epsilon(1e-15));
  }
  CHECK(json::parse(t.metadata)["model"] == "three_level");

  SUBCASE("mixing effective and three-level parameters is ambiguous") {
    SweepSpec bad = spec;
    bad.gamma = 1.0;
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
  }
  SUBCASE("incomplete three-level parameter set") {
    SweepSpec bad = spec;
    bad.delta0.reset();
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
  }
}

// ---------------------------------------------------------------------------
// io formatting
// ---------------------------------------------------------------------------

TEST_CASE("cell formatting") {
  CHECK(io::format_double(0.25) == "0.25");
  CHECK(io::format_double(3.0) == "3");
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1e-5) == "1e-05");
  CHECK(io::format_double(1e300) == "1e+300");
  CHECK(io::format_double(-2.5) == "-2.5");
  CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::format_double(0.19900497512437812) == "0.199004975124378");
}

TEST_CASE("trace and survival CSV layouts are pinned") {
  ContinuousTrace tr;
  tr.t = {0.0, 0.5};
  tr.p1 = {1.0, 0.8};
  tr.p2 = {0.0, 0.1};
  tr.p_tot = {1.0, 0.9};
  tr.W = {0.0, 0.2};
  const auto two = lines_of(io::trace_to_csv(tr));
  REQUIRE(two.size() == 3);
  CHECK(two[0] == "t,p1,p2,p_tot,W");
  CHECK(two[1] == "0,1,0,1,0");
  CHECK(two[2] == "0.5,0.8,0.1,0.9,0.2");

  Trajectory3 tr3;
  tr3.t = {0.0};
  tr3.p1 = {1.0};
  tr3.p2 = {0.0};
  tr3.p3 = {0.0};
  tr3.p_tot = {1.0};
  const auto three = lines_of(io::trace_to_csv(tr3));
  REQUIRE(three.size() == 2);
  CHECK(three[0] == "t,p1,p2,p3,p_tot");
  CHECK(three[1] == "0,1,0,0,1");

  SurvivalPoint pt;
  pt.k = 7;
  pt.t = 0.7;
  pt.p1_exact = 0.5;
  pt.p1_exponential = 0.625;
  const auto surv = lines_of(io::survival_to_csv({pt}));
  REQUIRE(surv.size() == 2);
  CHECK(surv[0] == "k,t,p1_exact,p1_exponential");
  CHECK(surv[1] == "7,0.7,0.5,0.625");  // k stays an integer
}

TEST_CASE("match result JSON carries exactly the documented keys") {
  MatchResult r;
  r.delta_t = 0.125;
  r.iterations = 4;
  r.residual = 1e-12;
  r.tau_c = 3.0;
  r.mean_t = 3.0000000000001;
  r.method = "newton";
  const json j = json::parse(io::match_to_json(r));
  CHECK(j.size() == 6);
  CHECK(j["delta_t"] == 0.125);
  CHECK(j["iterations"] == 4);
  CHECK(j["residual"] == 1e-12);
  CHECK(j["tau_c"] == 3.0);
  CHECK(j["mean_t"] == 3.0000000000001);
  CHECK(j["method"] == "newton");
}

TEST_CASE("file round trip") {
  const auto path = temp_file("roundtrip.csv");
  const std::string content = "a,b\n1,2\n";
  io::write_file(path.string(), content);
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == content);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(io::write_file("/nonexistent-dir/x/y.csv", "z"),
                  std::runtime_error);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

TEST_CASE("every preset runs and is listed") {
  const auto names = preset_names();
  REQUIRE(names.size() == 6);
  for (const auto& name : names) {
    CAPTURE(name);
    const SweepTable t = run_preset(name);
    CHECK(!t.columns.empty());
    CHECK(!t.rows.empty());
    CHECK(json::parse(t.metadata)["preset"] == name);
  }
  CHECK_THROWS_AS(run_preset("fig1"), std::invalid_argument);
}

TEST_CASE("preset fig2: lifetime against coupling strength") {
  const SweepTable t = run_preset("fig2");
  CHECK(t.columns == std::vector<std::string>{"gamma_over_omega",
                                              "tau_c_delta_0", "tau_c_delta_1",
                                              "tau_c_delta_3"});
  REQUIRE(t.rows.size() == 200);
  CHECK(t.rows.front()[0] == 0.05);
  CHECK(t.rows.back()[0] == 50.0);
  // tau_c(gamma=0.05) = 2/0.05 + 0.05 + 4 delta^2/0.05
  CHECK(t.rows.front()[1] == doctest::Approx(40.05).epsilon(1e-12));
  CHECK(t.rows.front()[2] == doctest::Approx(120.05).epsilon(1e-12));
  CHECK(t.rows.front()[3] == doctest::Approx(760.05).epsilon(1e-12));
}

TEST_CASE("preset fig3: equal-lifetime pair evolves to the same area") {
  const SweepTable t = run_preset("fig3");
  REQUIRE(t.columns.size() == 9);
  CHECK(t.columns[0] == "t");
  CHECK(t.columns[3] == "p_tot_weak");
  CHECK(t.columns[7] == "p_tot_strong");

  const json meta = json::parse(t.metadata)["parameters"];
  CHECK(std::abs(meta["gamma_weak"].get<double>() - 0.1) < 1e-8);
  CHECK(std::abs(meta["gamma_strong"].get<double>() - 20.0) < 1e-6);
  const double tw = meta["tau_c_weak"].get<double>();
  const double ts = meta["tau_c_strong"].get<double>();
  CHECK(std::abs(tw - ts) / ts < 1e-9);
  CHECK(ts == doctest::Approx(20.1).epsilon(1e-9));

  CHECK(t.rows.front()[0] == 0.0);
  CHECK(t.rows.back()[0] == doctest::Approx(80.4).epsilon(1e-15));
  CHECK(t.rows.front()[1] == 1.0);  // both start in the ground state
  CHECK(t.rows.front()[5] == 1.0);

  // Same lifetime, yet visibly different transients: the curves separate by
  // tens of percent before converging to equal areas.
  double max_gap = 0.0;
  for (const auto& row : t.rows) {
    max_gap = std::max(max_gap, std::abs(row[3] - row[7]));
  }
  CHECK(max_gap < 0.05);
  CHECK(max_gap > 0.01);
}

TEST_CASE("presets fig4 and fig5: matched intervals across the dip") {
  const SweepTable f4 = run_preset("fig4");
  CHECK(f4.columns == std::vector<std::string>{"gamma_over_omega", "tau_c",
                                               "delta_t_approx",
                                               "mean_t_approx"});
  REQUIRE(f4.rows.size() == 160);
  CHECK(f4.rows.front()[0] == 0.5);
  CHECK(f4.rows.back()[0] == 20.0);
  // First row by hand: tau_c = 2/0.5 + 0.5 + 36/0.5 = 76.5.
  CHECK(f4.rows.front()[1] == doctest::Approx(76.5).epsilon(1e-12));
  CHECK(f4.rows.front()[2] ==
        doctest::Approx(2.0 / 38.25).epsilon(1e-12));  // 4g/(2+g^2+4d^2)

  const SweepTable f5 = run_preset("fig5");
  CHECK(f5.columns ==
        std::vector<std::string>{"gamma_over_omega", "tau_c", "delta_t_approx",
                                 "mean_t_approx", "mean_t_newton1",
                                 "mean_t_newton3"});
  REQUIRE(f5.rows.size() == 160);
  CHECK(f5.never_detected_rows.empty());
  for (const auto& row : f5.rows) {
    // Three Newton refinements land within half a percent everywhere.
    CHECK(std::abs(row[5] - row[1]) / row[1] < 0.005);
  }
}

TEST_CASE("preset fig6-solid: resonant experimental parameters") {
  const SweepTable t = run_preset("fig6-solid");
  CHECK(t.columns == std::vector<std::string>{"s0", "Omega", "gamma", "delta0",
                                              "delta", "tau_c", "tau_line"});
  REQUIRE(t.rows.size() == 121);
  CHECK(t.rows.front()[0] == 1e-5);
  CHECK(t.rows.back()[0] == 0.1);

  const double omega = 2.0 * std::numbers::pi * 48.5;
  const double Gamma = 2.0 * std::numbers::pi * 1.74e6;
  double prev_excess = std::numeric_limits<double>::infinity();
  for (const auto& row : t.rows) {
    const double s0 = row[0];
    const double Om = row[1];
    const double gamma = row[2];
    CHECK(row[3] == 0.0);  // no calibration needed on resonance
    CHECK(row[4] == 0.0);
    CHECK(Om == doctest::Approx(Gamma * std::sqrt(0.5 * s0)).epsilon(1e-12));
    CHECK(gamma == doctest::Approx(Om * Om / Gamma).epsilon(1e-12));
    CHECK(row[6] == doctest::Approx(gamma / (omega * omega)).epsilon(1e-15));
    // tau_c - tau_line = 2/gamma on resonance
    CHECK(row[5] - row[6] == doctest::Approx(2.0 / gamma).epsilon(1e-9));
    // and the relative excess over the line shrinks monotonically with s0
    const double excess = (row[5] - row[6]) / row[6];
    CHECK(excess < prev_excess);
    prev_excess = excess;
  }

  // Pinned lifetimes on the decade grid points.
  CHECK(t.rows[30][0] == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(t.rows[30][5] == doctest::Approx(0.0095452175).epsilon(1e-6));
  CHECK(t.rows[60][0] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(t.rows[60][5] == doctest::Approx(0.059230705).epsilon(1e-6));
  CHECK(t.rows[90][0] == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(t.rows[90][5] == doctest::Approx(0.5886849).epsilon(1e-6));
}

TEST_CASE("preset fig6-dashed: calibrated detuned parameters") {
  const SweepTable cap = run_preset("fig6-dashed", Fig6DeltaSign::caption);
  CHECK(cap.columns ==
        std::vector<std::string>{"s0", "Omega", "gamma", "delta0",
                                 "delta0_approx", "delta", "tau_c",
                                 "tau_line"});
  REQUIRE(cap.rows.size() == 121);

  const int i_d0 = column_index(cap, "delta0");
  const int i_d0a = column_index(cap, "delta0_approx");
  const int i_delta = column_index(cap, "delta");
  for (const auto& row : cap.rows) {
    // exact calibration cancels the effective detuning
    CHECK(std::abs(row[i_delta]) < 1e-6);
    // the closed-form calibration agrees to 0.1% up to s0 = 0.01
    if (row[0] <= 0.01) {
      CHECK(std::abs(row[i_d0a] - row[i_d0]) / std::abs(row[i_d0]) <= 1e-3);
    }
  }

  const SweepTable txt = run_preset("fig6-dashed", Fig6DeltaSign::text);
  REQUIRE(txt.rows.size() == 121);
  // The two sign conventions are genuinely different datasets.
  CHECK(cap.rows.front()[i_d0] > 0.0);
  CHECK(txt.rows.front()[i_d0] < 0.0);
  CHECK(json::parse(cap.metadata)["parameters"]["delta_sign"] == "caption");
  CHECK(json::parse(txt.metadata)["parameters"]["delta_sign"] == "text");

  // Pinned first row of the text convention (s0 = 1e-5).
  CHECK(txt.rows.front()[0] == 1e-5);
  CHECK(txt.rows.front()[2] == doctest::Approx(3.79969393003032).epsilon(1e-12));
  CHECK(txt.rows.front()[i_d0] ==
        doctest::Approx(-6.95103771700169).epsilon(1e-12));
  CHECK(txt.rows.front()[i_d0a] ==
        doctest::Approx(-6.95103979699515).epsilon(1e-12));
}

TEST_CASE("presets are deterministic") {
  for (const char* name : {"fig4", "fig6-dashed"}) {
    CAPTURE(name);
    const std::string a = io::to_csv(run_preset(name));
    const std::string b = io::to_csv(run_preset(name));
    CHECK(a == b);
  }
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

TEST_CASE("cli: version and help") {
  const CliResult v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find("zenomatch") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"continuous", "--help"}).code == 0);
}

TEST_CASE("cli: continuous scalar report") {
  const CliResult r = run({"continuous", "--omega", "1", "--gamma", "2",
                           "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["tau_c"] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(j["tau_z"] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(j["gamma_at_minimum"] ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  SUBCASE("the hertz unit multiplies frequency inputs by 2 pi") {
    const CliResult h = run({"continuous", "--omega", "0.15915494309189535",
                             "--gamma", "0.3183098861837907", "--units",
                             "hertz", "--format", "json"});
    REQUIRE(h.code == 0);
    const json jh = json::parse(h.out);
    CHECK(jh["omega"] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(jh["tau_c"] == doctest::Approx(3.0).epsilon(1e-12));
  }

  SUBCASE("csv scalar layout: header row plus one data row") {
    const CliResult c = run({"continuous", "--omega", "1", "--gamma", "2"});
    REQUIRE(c.code == 0);
    const auto ls = lines_of(c.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "omega,gamma,delta,tau_c,tau_z,gamma_at_minimum");
    const auto row = parse_csv_row(ls[1]);
    CHECK(row[3] == doctest::Approx(3.0).epsilon(1e-12));
  }

  SUBCASE("trace mode emits the sampled evolution") {
    const CliResult c = run({"continuous", "--omega", "1", "--gamma", "0.5",
                             "--trace-until", "4", "--points", "50"});
    REQUIRE(c.code == 0);
    const auto ls = lines_of(c.out);
    CHECK(ls[0] == "t,p1,p2,p_tot,W");
    CHECK(ls.size() >= 51);
    CHECK(parse_csv_row(ls[1]) ==
          std::vector<double>{0.0, 1.0, 0.0, 1.0, 0.0});
    CHECK(parse_csv_row(ls.back())[0] == doctest::Approx(4.0).epsilon(1e-15));
  }
}

TEST_CASE("cli: pulsed scalar report and survival curve") {
  const CliResult r = run({"pulsed", "--omega", "1", "--delta-t",
                           "3.1415926535897931", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["P2"] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(j["mean_time"] == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(j["zeno_regime"] == false);

  const CliResult s = run({"pulsed", "--omega", "1", "--delta-t", "0.1",
                           "--survival", "100"});
  REQUIRE(s.code == 0);
  const auto ls = lines_of(s.out);
  REQUIRE(ls.size() == 101);
  CHECK(ls[0] == "k,t,p1_exact,p1_exponential");
  const auto last = parse_csv_row(ls.back());
  CHECK(last[0] == 100.0);
  CHECK(last[1] == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(last[2] == doctest::Approx(0.77871960809612380).epsilon(1e-12));
  CHECK(last[3] == doctest::Approx(0.77880078307140487).epsilon(1e-12));
}

TEST_CASE("cli: match in both methods") {
  SUBCASE("closed form") {
    const CliResult r = run({"match", "--omega", "1", "--gamma", "20",
                             "--method", "approx", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["delta_t"] == doctest::Approx(80.0 / 402.0).epsilon(1e-15));
    CHECK(j["method"] == "approx");
    CHECK(j["iterations"] == 0);
    CHECK(j["tau_c"] == doctest::Approx(20.1).epsilon(1e-15));
    CHECK(j["residual"].get<double>() < 0.01);  // ~0.5% at gamma/omega = 20
  }
  SUBCASE("newton at the hardest point") {
    const CliResult r = run({"match", "--omega", "1", "--gamma",
                             "1.4142135623730951", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["delta_t"].get<double>() - 1.9905300126398653) /
              1.9905300126398653 <
          1e-9);
    CHECK(j["method"] == "newton");
    CHECK(j["residual"].get<double>() <= 1e-10);
    CHECK(j["iterations"].get<int>() >= 1);
  }
  SUBCASE("csv layout") {
    const CliResult r = run({"match", "--omega", "1", "--gamma", "20",
                             "--method", "approx"});
    REQUIRE(r.code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "delta_t,iterations,residual,tau_c,mean_t,method");
    CHECK(ls[1].substr(ls[1].rfind(',') + 1) == "approx");
  }
}

TEST_CASE("cli: gamma-pair") {
  const CliResult r = run({"gamma-pair", "--omega", "1", "--target-tau", "3",
                           "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["gamma_weak"].get<double>() - 1.0) < 1e-9);
  CHECK(std::abs(j["gamma_strong"].get<double>() - 2.0) < 1e-9);
  CHECK(j["tau_c_weak"] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(j["tau_c_strong"] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("cli: evolve trajectory and lifetime") {
  SUBCASE("trajectory") {
    const CliResult r = run({"evolve", "--omega", "1", "--Omega", "2",
                             "--Gamma", "4", "--t-max", "5", "--points", "11"});
    REQUIRE(r.code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 12);
    CHECK(ls[0] == "t,p1,p2,p3,p_tot");
    CHECK(parse_csv_row(ls[1])[1] == 1.0);
    CHECK(parse_csv_row(ls.back())[0] == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("lifetime") {
    const CliResult r = run({"evolve", "--omega", "1", "--Omega", "2",
                             "--Gamma", "4", "--lifetime", "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["tau3"] == doctest::Approx(3.125).epsilon(1e-3));
    CHECK(j["detected_fraction"] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(j["tau_c_effective"] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(j["s0"] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("saturation sets the coupling") {
    const CliResult r = run({"evolve", "--omega", "1", "--Gamma", "200",
                             "--s0", "0.0002", "--lifetime", "--format",
                             "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["Omega"] == doctest::Approx(2.0).epsilon(1e-12));
    const double tau3 = j["tau3"].get<double>();
    const double tau_c = j["tau_c_effective"].get<double>();
    CHECK(tau_c == doctest::Approx(100.02).epsilon(1e-12));
    CHECK(std::abs(tau3 - tau_c) / tau_c < 5e-4);
  }
  SUBCASE("flag conflicts and omissions") {
    CHECK(run({"evolve", "--omega", "1", "--Gamma", "4", "--Omega", "2",
               "--s0", "0.1", "--t-max", "1"})
              .code == 2);
    CHECK(run({"evolve", "--omega", "1", "--Gamma", "4", "--t-max", "1"})
              .code == 2);  // neither --Omega nor --s0
    CHECK(run({"evolve", "--omega", "1", "--Gamma", "4", "--Omega", "2"})
              .code == 2);  // no --t-max and no --lifetime
    CHECK(run({"evolve", "--omega", "1", "--Gamma", "4", "--Omega", "2",
               "--delta0", "1", "--calibrate", "--t-max", "1"})
              .code == 2);
  }
}

TEST_CASE("cli: sweep from a config file") {
  const auto path = temp_file("config.json");
  io::write_file(path.string(),
                 R"({"variable":"gamma_over_omega","min":0.5,"max":5,)"
                 R"("count":5,"spacing":"log","omega":1,"delta":0,)"
                 R"("outputs":["tau_c","delta_t_exact","mean_t"]})");

  const CliResult r = run({"sweep", "--config", path.string()});
  REQUIRE(r.code == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 7);  // metadata + header + 5 rows
  CHECK(ls[0][0] == '#');
  CHECK(ls[1] == "gamma_over_omega,tau_c,delta_t_exact,mean_t");
  const auto row = parse_csv_row(ls[2]);
  CHECK(row[0] == 0.5);
  CHECK(row[1] == doctest::Approx(4.5).epsilon(1e-12));  // 2/0.5 + 0.5
  CHECK(std::abs(row[3] - row[1]) / row[1] < 1e-9);

  SUBCASE("json format wraps the same table") {
    const CliResult rj =
        run({"sweep", "--config", path.string(), "--format", "json"});
    REQUIRE(rj.code == 0);
    const json j = json::parse(rj.out);
    CHECK(j["columns"][0] == "gamma_over_omega");
    CHECK(j["rows"].size() == 5);
    CHECK(j["metadata"]["spec"]["count"] == 5);
  }
  std::filesystem::remove(path);
}

TEST_CASE("cli: presets and --out") {
  const CliResult direct = run({"preset", "fig2"});
  REQUIRE(direct.code == 0);
  const auto ls = lines_of(direct.out);
  REQUIRE(ls.size() == 202);  // metadata + header + 200 rows
  CHECK(ls[0][0] == '#');
  CHECK(ls[1] == "gamma_over_omega,tau_c_delta_0,tau_c_delta_1,tau_c_delta_3");
  CHECK(json::parse(ls[0].substr(1))["preset"] == "fig2");

  SUBCASE("--out writes the identical payload to a file") {
    const auto path = temp_file("fig2.csv");
    const CliResult filed = run({"preset", "fig2", "--out", path.string()});
    REQUIRE(filed.code == 0);
    CHECK(filed.out.empty());
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == direct.out);
    std::filesystem::remove(path);
  }

  SUBCASE("the sign convention reaches the preset") {
    const CliResult a = run({"preset", "fig6-dashed", "--delta-sign", "text"});
    const CliResult b = run({"preset", "fig6-dashed", "--delta-sign", "text"});
    const CliResult c = run({"preset", "fig6-dashed"});
    REQUIRE(a.code == 0);
    REQUIRE(c.code == 0);
    CHECK(a.out == b.out);  // byte-identical reruns
    CHECK(a.out != c.out);  // caption and text differ
  }
}

TEST_CASE("cli: exit codes") {
  SUBCASE("invalid arguments exit 2") {
    CHECK(run({}).code == 2);                      // no subcommand
    CHECK(run({"frobnicate"}).code == 2);          // unknown subcommand
    CHECK(run({"continuous", "--omega", "1"}).code == 2);  // missing --gamma
    CHECK(run({"preset", "fig1"}).code == 2);      // unknown preset
    CHECK(run({"preset"}).code == 2);              // missing name
    CHECK(run({"sweep"}).code == 2);               // missing --config
    CHECK(run({"sweep", "--config", "/nonexistent.json"}).code == 2);
    CHECK(run({"continuous", "--omega", "1", "--gamma", "2", "--format",
               "yaml"})
              .code == 2);
    CHECK(run({"continuous", "--omega", "0", "--gamma", "2"}).code == 2);

    const auto bad = temp_file("bad_config.json");
    io::write_file(bad.string(), R"({"variable":"time","min":0})");
    CHECK(run({"sweep", "--config", bad.string()}).code == 2);
    std::filesystem::remove(bad);
  }
  SUBCASE("solver failures exit 3") {
    const CliResult below =
        run({"gamma-pair", "--omega", "1", "--target-tau", "2"});
    CHECK(below.code == 3);
    CHECK(below.err.find("error") != std::string::npos);

    const CliResult stall =
        run({"match", "--omega", "1", "--gamma", "1.4142135623730951",
             "--derivative", "approx"});
    CHECK(stall.code == 3);
    CHECK(stall.err.find("best delta_t") != std::string::npos);
  }
  SUBCASE("never-detected configurations exit 4") {
    const CliResult cont = run({"continuous", "--omega", "1", "--gamma", "0"});
    CHECK(cont.code == 4);
    CHECK(cont.err.find("never detected") != std::string::npos);

    CHECK(run({"evolve", "--omega", "1", "--Omega", "0", "--Gamma", "4",
               "--lifetime"})
              .code == 4);
  }
}
