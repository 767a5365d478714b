#include "zenomatch/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace zenomatch::io {

namespace {

using nlohmann::json;

void append_row(std::string& out, const std::vector<double>& row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += format_double(row[i]);
  }
  out += '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string to_csv(const SweepTable& table) {
  std::string out;
  if (!table.metadata.empty()) {
    out += '#';
    out += table.metadata;
    out += '\n';
  }
  for (size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) append_row(out, row);
  return out;
}

std::string to_json(const SweepTable& table) {
  json j;
  j["metadata"] = table.metadata.empty() ? json::object()
                                         : json::parse(table.metadata);
  j["columns"] = table.columns;
  j["rows"] = table.rows;  // NaN cells serialize as null
  j["never_detected_rows"] = table.never_detected_rows;
  return j.dump();
}

std::string trace_to_csv(const ContinuousTrace& trace) {
  std::string out = "t,p1,p2,p_tot,W\n";
  for (size_t i = 0; i < trace.t.size(); ++i) {
    append_row(out,
               {trace.t[i], trace.p1[i], trace.p2[i], trace.p_tot[i],
                trace.W[i]});
  }
  return out;
}

std::string trace_to_csv(const Trajectory3& trace) {
  std::string out = "t,p1,p2,p3,p_tot\n";
  for (size_t i = 0; i < trace.t.size(); ++i) {
    append_row(out,
               {trace.t[i], trace.p1[i], trace.p2[i], trace.p3[i],
                trace.p_tot[i]});
  }
  return out;
}

std::string survival_to_csv(const std::vector<SurvivalPoint>& curve) {
  std::string out = "k,t,p1_exact,p1_exponential\n";
  for (const auto& p : curve) {
    out += std::to_string(p.k);
    out += ',';
    out += format_double(p.t);
    out += ',';
    out += format_double(p.p1_exact);
    out += ',';
    out += format_double(p.p1_exponential);
    out += '\n';
  }
  return out;
}

std::string match_to_json(const MatchResult& r) {
  json j;
  j["delta_t"] = r.delta_t;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["tau_c"] = r.tau_c;
  j["mean_t"] = r.mean_t;
  j["method"] = r.method;
  return j.dump();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("failed while writing: " + path);
}

}  // namespace zenomatch::io
