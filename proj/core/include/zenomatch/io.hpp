#pragma once

#include <string>
#include <vector>

#include "zenomatch/continuous.hpp"
#include "zenomatch/matcher.hpp"
#include "zenomatch/pulsed.hpp"
#include "zenomatch/sweep.hpp"
#include "zenomatch/three_level.hpp"

namespace zenomatch::io {

// %.15g -- the fixed data-cell format used by every CSV emitter.
std::string format_double(double v);

// CSV with a '#'-prefixed JSON metadata line, then a header row, then data.
std::string to_csv(const SweepTable& table);

// {"metadata": {...}, "columns": [...], "rows": [[...], ...]}
std::string to_json(const SweepTable& table);

// Columns: t, p1, p2, p_tot, W
std::string trace_to_csv(const ContinuousTrace& trace);

// Columns: t, p1, p2, p3, p_tot
std::string trace_to_csv(const Trajectory3& trace);

// Columns: k, t, p1_exact, p1_exponential
std::string survival_to_csv(const std::vector<SurvivalPoint>& curve);

// {"delta_t":..., "iterations":..., "residual":..., "tau_c":..., "mean_t":...,
//  "method":"approx"|"newton"}
std::string match_to_json(const MatchResult& r);

void write_file(const std::string& path, const std::string& content);

}  // namespace zenomatch::io
