#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stmqc/config_io.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/planner.hpp"
#include "stmqc/protocols.hpp"
#include "stmqc/pulse.hpp"
#include "stmqc/readout.hpp"

namespace stmqc {

// artifact provenance payload; every file a run writes carries it as a
// comment line
inline std::string provenance_comment(std::uint64_t config_hash, std::uint64_t seed) {
  std::ostringstream os;
  os << "config_hash=0x" << std::hex << std::setfill('0') << std::setw(16) << config_hash
     << std::dec << " seed=" << seed;
  return os.str();
}

// ---------------------------------------------------------------------------
// frequency table <-> csv

inline void write_frequency_table_csv(std::ostream& out, const FrequencyTable& table,
                                      const std::vector<std::string>& comment_lines = {}) {
  for (const auto& line : comment_lines) out << "# " << line << "\n";
  out << "# delta_f_e_hz=" << detail::fmt17(table.delta_f_e) << "\n";
  out << "# delta_f_n_hz=" << detail::fmt17(table.delta_f_n) << "\n";
  out << "# f_nd_hz=" << detail::fmt17(table.f_nd) << "\n";
  out << "# f_nd_prime_hz=" << detail::fmt17(table.f_nd_prime) << "\n";
  out << "site,field_T,f_e0_hz,f_e1_hz,f_n_hz,site_f_nd_hz,site_f_nd_prime_hz\n";
  for (int k = 0; k < table.n_sites(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    out << k << ',' << detail::fmt17(table.field_b[i]) << ',' << detail::fmt17(table.f_e0[i])
        << ',' << detail::fmt17(table.f_e1[i]) << ',' << detail::fmt17(table.f_n[i]) << ','
        << detail::fmt17(table.site_f_nd[i]) << ',' << detail::fmt17(table.site_f_nd_prime[i])
        << "\n";
  }
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number_field(const std::string& cell, int lineno, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0')
    throw std::runtime_error("frequency table csv line " + std::to_string(lineno) + ": bad " +
                             what + " '" + cell + "'");
  return v;
}

// "# key=value" comment payloads carry the chain-level quantities
inline bool comment_value(const std::string& line, const std::string& key, double& out) {
  const std::string tag = key + "=";
  const std::size_t pos = line.find(tag);
  if (pos == std::string::npos) return false;
  out = std::strtod(line.c_str() + pos + tag.size(), nullptr);
  return true;
}

}  // namespace detail

inline FrequencyTable parse_frequency_table_csv(std::istream& in) {
  FrequencyTable table;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '#') {
      detail::comment_value(line, "delta_f_e_hz", table.delta_f_e);
      detail::comment_value(line, "delta_f_n_hz", table.delta_f_n);
      detail::comment_value(line, "f_nd_hz", table.f_nd);
      detail::comment_value(line, "f_nd_prime_hz", table.f_nd_prime);
      continue;
    }
    if (!header_seen) {  // column header row
      header_seen = true;
      continue;
    }
    const auto cells = detail::split_csv_row(line);
    if (cells.size() != 7)
      throw std::runtime_error("frequency table csv line " + std::to_string(lineno) +
                               ": expected 7 columns, got " + std::to_string(cells.size()));
    table.field_b.push_back(detail::parse_number_field(cells[1], lineno, "field"));
    table.f_e0.push_back(detail::parse_number_field(cells[2], lineno, "f_e0"));
    table.f_e1.push_back(detail::parse_number_field(cells[3], lineno, "f_e1"));
    table.f_n.push_back(detail::parse_number_field(cells[4], lineno, "f_n"));
    table.site_f_nd.push_back(detail::parse_number_field(cells[5], lineno, "site_f_nd"));
    table.site_f_nd_prime.push_back(
        detail::parse_number_field(cells[6], lineno, "site_f_nd_prime"));
  }
  return table;
}

// ---------------------------------------------------------------------------
// constraint report rendering

inline std::string render_constraint_report_text(const ConstraintReport& report) {
  std::size_t name_w = 5, status_w = 6;
  for (const auto& c : report.checks) {
    name_w = std::max(name_w, c.name.size());
    name_w = std::max(name_w, std::string(status_name(c.status)).size());
  }
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(name_w) + 2) << "check"
     << std::setw(static_cast<int>(status_w) + 2) << "status" << std::setw(14) << "margin"
     << "detail\n";
  for (const auto& c : report.checks) {
    std::ostringstream margin;
    margin << std::setprecision(6) << c.margin;
    os << std::left << std::setw(static_cast<int>(name_w) + 2) << c.name
       << std::setw(static_cast<int>(status_w) + 2) << status_name(c.status) << std::setw(14)
       << margin.str() << c.formula << "\n";
  }
  os << "overall: "
     << (report.any_fail() ? "fail" : (report.any_warning() ? "pass with warnings" : "pass"))
     << "\n";
  return os.str();
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += "\"\"";
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline void write_constraint_report_csv(std::ostream& out, const ConstraintReport& report,
                                        const std::vector<std::string>& comment_lines = {}) {
  for (const auto& line : comment_lines) out << "# " << line << "\n";
  out << "check,status,margin,detail\n";
  for (const auto& c : report.checks)
    out << detail::csv_quote(c.name) << ',' << status_name(c.status) << ','
        << detail::fmt17(c.margin) << ',' << detail::csv_quote(c.formula) << "\n";
}

inline void write_collisions_csv(std::ostream& out, const std::vector<FrequencyCollision>& hits,
                                 const std::vector<std::string>& comment_lines = {}) {
  for (const auto& line : comment_lines) out << "# " << line << "\n";
  out << "site_j,transition_j,site_k,transition_k,separation_hz\n";
  for (const auto& h : hits)
    out << h.site_j << ',' << h.transition_j << ',' << h.site_k << ',' << h.transition_k << ','
        << detail::fmt17(h.separation) << "\n";
}

// ---------------------------------------------------------------------------
// traces and protocol reports

inline void write_trace_csv(std::ostream& out, const ReadoutTrace& trace,
                            const std::vector<std::string>& comment_lines = {}) {
  for (const auto& line : comment_lines) out << "# " << line << "\n";
  out << "# sample_rate_hz=" << detail::fmt17(trace.sample_rate) << "\n";
  out << "# mixdown_hz=" << detail::fmt17(trace.mixdown_frequency) << "\n";
  out << "time_s,amplitude\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    out << detail::fmt17(static_cast<double>(i) / trace.sample_rate) << ','
        << detail::fmt17(trace.samples[i]) << "\n";
}

inline std::string render_protocol_report_text(const ProtocolReport& report) {
  std::ostringstream os;
  os << "protocol: " << report.protocol << "\n";
  if (report.aborted) os << "status: aborted\n";
  for (const auto& step : report.step_frequencies)
    os << "  " << step.label << ": " << detail::fmt17(step.frequency) << " Hz\n";
  if (!report.outcome_bits.empty()) {
    os << "  outcome bits:";
    for (const int b : report.outcome_bits) os << ' ' << b;
    os << "\n";
  }
  for (const auto& [name, value] : report.metrics)
    os << "  " << name << ": " << detail::fmt17(value) << "\n";
  os << "  wall-model duration: " << detail::fmt17(report.wall_model_duration) << " s\n";
  for (const auto& w : report.warnings) os << "  warning: " << w << "\n";
  return os.str();
}

}  // namespace stmqc
