#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "stmqc/chain.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/protocols.hpp"

namespace stmqc {

// drive amplitudes a pulse program intends to use
struct PulsePlan {
  double f_nR_onequbit = 0.0;  // nuclear Rabi for one-qubit rotations, Hz
  double f_nR_gate = 0.0;      // nuclear Rabi for the conditional gate, Hz
  double f_eR = 0.0;           // electron Rabi, Hz

  void validate() const {
    if (f_nR_onequbit <= 0 || f_nR_gate <= 0 || f_eR <= 0)
      throw std::invalid_argument("pulse plan: rabi frequencies must be > 0");
  }
};

// plan with every free knob at its chain-derived default
inline PulsePlan default_pulse_plan(const ChainConfig& config) {
  PulsePlan plan;
  plan.f_nR_onequbit = default_onequbit_rabi(config);
  plan.f_nR_gate = default_gate_rabi(bulk_f_nd(config));
  plan.f_eR = 1e5;
  return plan;
}

enum class CheckStatus { pass, warning, fail };

inline const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::warning: return "warning";
    case CheckStatus::fail: return "fail";
  }
  return "?";
}

struct ConstraintCheck {
  std::string name;
  std::string formula;  // the inequality with its numbers filled in
  CheckStatus status = CheckStatus::pass;
  double margin = 0.0;  // ratio of budget to demand; > 1 means satisfied
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;

  bool any_fail() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const ConstraintCheck& c) { return c.status == CheckStatus::fail; });
  }
  bool any_warning() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const ConstraintCheck& c) { return c.status == CheckStatus::warning; });
  }
  // process exit contract: 0 all pass, 1 any failure, 2 warnings only
  int exit_status() const { return any_fail() ? 1 : (any_warning() ? 2 : 0); }
};

// a pair of addressable transitions on distinct sites closer than a linewidth
struct FrequencyCollision {
  int site_j = 0;
  int site_k = 0;
  std::string transition_j;
  std::string transition_k;
  double separation = 0.0;  // |f_j - f_k|, Hz
};

namespace detail {

struct TransitionLine {
  int site;
  std::string label;
  double frequency;
};

inline std::vector<FrequencyCollision> scan_lines(const std::vector<TransitionLine>& lines,
                                                  double linewidth) {
  if (linewidth <= 0) throw std::invalid_argument("collision scan: linewidth must be > 0");
  std::vector<FrequencyCollision> hits;
  for (std::size_t a = 0; a < lines.size(); ++a) {
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      if (lines[a].site == lines[b].site) continue;
      const double sep = std::abs(lines[a].frequency - lines[b].frequency);
      if (sep < linewidth)
        hits.push_back({lines[a].site, lines[b].site, lines[a].label, lines[b].label, sep});
    }
  }
  return hits;
}

inline std::vector<TransitionLine> electron_lines(const FrequencyTable& table) {
  std::vector<TransitionLine> lines;
  lines.reserve(2 * static_cast<std::size_t>(table.n_sites()));
  for (int k = 0; k < table.n_sites(); ++k) {
    lines.push_back({k, "f_e0", table.f_e0[static_cast<std::size_t>(k)]});
    lines.push_back({k, "f_e1", table.f_e1[static_cast<std::size_t>(k)]});
  }
  return lines;
}

inline std::vector<TransitionLine> nuclear_lines(const FrequencyTable& table) {
  std::vector<TransitionLine> lines;
  lines.reserve(static_cast<std::size_t>(table.n_sites()));
  for (int k = 0; k < table.n_sites(); ++k)
    lines.push_back({k, "f_n", table.f_n[static_cast<std::size_t>(k)]});
  return lines;
}

inline double min_cross_site_separation(const std::vector<TransitionLine>& lines) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < lines.size(); ++a)
    for (std::size_t b = a + 1; b < lines.size(); ++b)
      if (lines[a].site != lines[b].site)
        best = std::min(best, std::abs(lines[a].frequency - lines[b].frequency));
  return best;
}

inline std::string fmt_hz(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

// brute-force pairwise scan of the electron transition grid {f_e0, f_e1} for
// cross-site near-degeneracies within `linewidth`. the electron lines are the
// ones whose aliasing is structural (the hyperfine splitting re-enters the
// grid every A/h / delta_f_e sites); the nuclear grid lives three orders of
// magnitude tighter and is scanned separately at its own linewidth by
// scan_nuclear_collisions.
inline std::vector<FrequencyCollision> scan_frequency_collisions(const ChainConfig& config,
                                                                 double linewidth) {
  const FrequencyTable table = build_frequency_table(config);
  return detail::scan_lines(detail::electron_lines(table), linewidth);
}

// companion scan over the per-site nuclear transitions f_n
inline std::vector<FrequencyCollision> scan_nuclear_collisions(const ChainConfig& config,
                                                               double linewidth) {
  const FrequencyTable table = build_frequency_table(config);
  return detail::scan_lines(detail::nuclear_lines(table), linewidth);
}

// site offset at which the hyperfine splitting aliases onto the electron
// Zeeman ladder: (A/h) / delta_f_e. sites that far apart share an electron
// carrier between opposite nuclear branches.
inline double hyperfine_alias_offset(const ChainConfig& config) {
  const FrequencyTable table = build_frequency_table(config);
  if (table.delta_f_e <= 0)
    throw std::invalid_argument("hyperfine_alias_offset: needs a nonzero field gradient");
  return config.species.hyperfine_A_over_h / table.delta_f_e;
}

// frequency-budget audit of a pulse plan against a chain layout. every row
// compares a demand against the budget that must dominate it; margin is
// budget/demand, so > 1 passes. t1e is the electron relaxation time in s.
inline ConstraintReport check_budget(const ChainConfig& config, const PulsePlan& plan,
                                     double t1e) {
  config.validate();
  plan.validate();
  if (t1e <= 0) throw std::invalid_argument("check_budget: t1e must be > 0");
  const FrequencyTable table = build_frequency_table(config);
  ConstraintReport report;
  auto ratio_check = [&](const std::string& name, const std::string& demand_label, double demand,
                         const std::string& budget_label, double budget, CheckStatus on_violation) {
    ConstraintCheck c;
    c.name = name;
    c.margin = demand > 0 ? budget / demand : std::numeric_limits<double>::infinity();
    c.status = budget > demand ? CheckStatus::pass : on_violation;
    c.formula = demand_label + " = " + detail::fmt_hz(demand) + " < " + budget_label + " = " +
                detail::fmt_hz(budget);
    report.checks.push_back(std::move(c));
  };

  // (a) one-qubit drive must resolve neighboring nuclear sites
  ratio_check("one-qubit site selectivity", "f_nR_onequbit", plan.f_nR_onequbit, "delta_f_n",
              table.delta_f_n, CheckStatus::fail);
  // (b) gate drive should resolve the conditional splitting; the synchronized
  // drive makes a too-fast choice recoverable, so this is advisory
  ratio_check("gate conditional selectivity", "f_nR_gate", plan.f_nR_gate, "f_nd", table.f_nd,
              CheckStatus::warning);
  // (c) conditional splitting must itself fit inside the site spacing
  ratio_check("dipole splitting within site spacing", "f_nd", table.f_nd, "delta_f_n",
              table.delta_f_n, CheckStatus::fail);
  // (d) electron drive must resolve neighboring electron sites
  ratio_check("electron site selectivity", "f_eR", plan.f_eR, "delta_f_e", table.delta_f_e,
              CheckStatus::fail);
  // (e) the conditional pi-pulse must finish well inside electron relaxation
  ratio_check("gate duration within electron lifetime", "gate pi time 1/(2 f_nR_gate)",
              pi_pulse_duration(plan.f_nR_gate), "t1e", t1e, CheckStatus::fail);

  // (f) no cross-site transition may fall within a linewidth of another;
  // each channel is scanned at its own drive linewidth
  {
    const double lw_e = plan.f_eR;
    const double lw_n = std::max(plan.f_nR_onequbit, plan.f_nR_gate);
    const auto e_lines = detail::electron_lines(table);
    const auto n_lines = detail::nuclear_lines(table);
    const auto e_hits = detail::scan_lines(e_lines, lw_e);
    const auto n_hits = detail::scan_lines(n_lines, lw_n);
    const double e_margin = detail::min_cross_site_separation(e_lines) / lw_e;
    const double n_margin =
        config.n_ions > 1 ? detail::min_cross_site_separation(n_lines) / lw_n
                          : std::numeric_limits<double>::infinity();
    ConstraintCheck c;
    c.name = "cross-site frequency collisions";
    c.margin = std::min(e_margin, n_margin);
    c.status = (e_hits.empty() && n_hits.empty()) ? CheckStatus::pass : CheckStatus::fail;
    c.formula = std::to_string(e_hits.size()) + " electron pair(s) within " +
                detail::fmt_hz(lw_e) + " Hz, " + std::to_string(n_hits.size()) +
                " nuclear pair(s) within " + detail::fmt_hz(lw_n) + " Hz";
    report.checks.push_back(std::move(c));
  }

  // informational: the stated regime orders the hyperfine splitting below the
  // electron site spacing, which no realizable gradient achieves at nm pitch;
  // selectivity actually rides on delta_f_e alone, so a violation here only
  // warns
  {
    ConstraintCheck c;
    c.name = "hyperfine below electron site spacing (stated regime)";
    const double a_h = config.species.hyperfine_A_over_h;
    c.margin = a_h > 0 ? table.delta_f_e / a_h : std::numeric_limits<double>::infinity();
    c.status = table.delta_f_e > a_h ? CheckStatus::pass : CheckStatus::warning;
    c.formula = "A/h = " + detail::fmt_hz(a_h) + " < delta_f_e = " + detail::fmt_hz(table.delta_f_e);
    report.checks.push_back(std::move(c));
  }

  // informational: where the hyperfine splitting aliases onto the ladder
  if (table.delta_f_e > 0) {
    ConstraintCheck c;
    c.name = "hyperfine aliasing site offset";
    const double ratio = config.species.hyperfine_A_over_h / table.delta_f_e;
    c.margin = ratio;
    c.status = CheckStatus::pass;
    c.formula = "(A/h) / delta_f_e = " + detail::fmt_hz(ratio) + " sites (nearest " +
                std::to_string(static_cast<long long>(std::llround(ratio))) + ")";
    report.checks.push_back(std::move(c));
  }

  return report;
}

}  // namespace stmqc
