#pragma once

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stmqc/chain.hpp"
#include "stmqc/planner.hpp"
#include "stmqc/readout.hpp"

namespace stmqc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ini-style config: [section] headers, key = value lines, '#'/';' comments.
// entries keep their provenance so diagnostics can name file and line.
struct RawConfig {
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    std::string source;  // file name or "--set"
    int line = 0;
  };
  std::vector<Entry> entries;

  // last assignment wins, like every ini dialect
  const Entry* find(std::string_view section, std::string_view key) const {
    const Entry* hit = nullptr;
    for (const auto& e : entries)
      if (e.section == section && e.key == key) hit = &e;
    return hit;
  }

  void set(std::string section, std::string key, std::string value, std::string source,
           int line = 0) {
    entries.push_back({std::move(section), std::move(key), std::move(value), std::move(source),
                       line});
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void config_fail(const std::string& source, int line,
                                     const std::string& message) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  os << ": " << message;
  throw ConfigError(os.str());
}

}  // namespace detail

inline RawConfig parse_ini(std::istream& in, const std::string& source) {
  RawConfig cfg;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        detail::config_fail(source, lineno, "section header missing closing ']'");
      section = detail::trim(std::string_view(body).substr(1, body.size() - 2));
      if (section.empty()) detail::config_fail(source, lineno, "empty section name");
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      detail::config_fail(source, lineno, "expected 'key = value', got '" + body + "'");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) detail::config_fail(source, lineno, "empty key");
    if (section.empty())
      detail::config_fail(source, lineno, "key '" + key + "' appears before any [section]");
    if (value.empty()) detail::config_fail(source, lineno, "field '" + key + "' has no value");
    cfg.set(section, key, value, source, lineno);
  }
  return cfg;
}

inline RawConfig parse_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_ini(in, path);
}

// command-line override "section.key=value", applied after file parse and
// before validation
inline void apply_override(RawConfig& cfg, const std::string& spec) {
  const std::size_t eq = spec.find('=');
  const std::size_t dot = spec.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError("--set '" + spec + "': expected section.key=value");
  const std::string section = detail::trim(std::string_view(spec).substr(0, dot));
  const std::string key = detail::trim(std::string_view(spec).substr(dot + 1, eq - dot - 1));
  const std::string value = detail::trim(std::string_view(spec).substr(eq + 1));
  if (section.empty() || key.empty() || value.empty())
    throw ConfigError("--set '" + spec + "': expected section.key=value");
  cfg.set(section, key, value, "--set");
}

// fnv-1a, the usual 64-bit offset/prime pair
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// hash of the effective key-value set (post-override, last assignment wins),
// canonically ordered so file layout and override order do not matter
inline std::uint64_t config_hash(const RawConfig& cfg) {
  std::map<std::pair<std::string, std::string>, std::string> effective;
  for (const auto& e : cfg.entries) effective[{e.section, e.key}] = e.value;
  std::string canon;
  for (const auto& [sk, value] : effective) {
    canon += sk.first;
    canon += '.';
    canon += sk.second;
    canon += '=';
    canon += value;
    canon += '\n';
  }
  return fnv1a64(canon);
}

// everything a run needs, with chain-derived defaults already substituted
struct ResolvedConfig {
  ChainConfig chain;
  PulsePlan plan;
  double t1e = 0.1;  // electron relaxation time, s
  ReadoutParams readout;
  std::uint64_t hash = 0;
};

namespace detail {

struct FieldReader {
  const RawConfig& cfg;
  // keys consumed, to reject typos afterwards
  mutable std::vector<std::pair<std::string, std::string>> seen;

  const RawConfig::Entry* lookup(const std::string& section, const std::string& key) const {
    seen.emplace_back(section, key);
    return cfg.find(section, key);
  }

  double number(const std::string& section, const std::string& key, double fallback,
                bool required) const {
    const auto* e = lookup(section, key);
    if (!e) {
      if (required)
        throw ConfigError("missing required field '" + section + "." + key + "'");
      return fallback;
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e->value.c_str(), &end);
    if (end == e->value.c_str() || *end != '\0' || errno == ERANGE)
      config_fail(e->source, e->line,
                  "field '" + section + "." + key + "': '" + e->value + "' is not a number");
    return v;
  }

  long long integer(const std::string& section, const std::string& key, long long fallback,
                    bool required) const {
    const auto* e = lookup(section, key);
    if (!e) {
      if (required)
        throw ConfigError("missing required field '" + section + "." + key + "'");
      return fallback;
    }
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(e->value.c_str(), &end, 10);
    if (end == e->value.c_str() || *end != '\0' || errno == ERANGE)
      config_fail(e->source, e->line,
                  "field '" + section + "." + key + "': '" + e->value + "' is not an integer");
    return v;
  }

  std::string text(const std::string& section, const std::string& key, std::string fallback,
                   bool required) const {
    const auto* e = lookup(section, key);
    if (!e) {
      if (required)
        throw ConfigError("missing required field '" + section + "." + key + "'");
      return fallback;
    }
    return e->value;
  }

  void reject_unknown() const {
    for (const auto& e : cfg.entries) {
      const bool known =
          std::any_of(seen.begin(), seen.end(), [&](const auto& sk) {
            return sk.first == e.section && sk.second == e.key;
          });
      if (!known)
        config_fail(e.source, e.line, "unknown field '" + e.section + "." + e.key + "'");
    }
  }
};

}  // namespace detail

inline ResolvedConfig resolve_config(const RawConfig& raw) {
  const detail::FieldReader r{raw, {}};
  ResolvedConfig out;

  out.chain.species.name = r.text("species", "name", "", true);
  out.chain.species.g_e = r.number("species", "g_e", 0, true);
  out.chain.species.gamma_n_over_2pi = r.number("species", "gamma_n_over_2pi", 0, true);
  out.chain.species.hyperfine_A_over_h = r.number("species", "A_over_h", 0, true);

  out.chain.n_ions = static_cast<int>(r.integer("chain", "n_ions", 0, true));
  out.chain.spacing_a = r.number("chain", "a", 0, true);
  out.chain.b0 = r.number("chain", "B0", 0, true);
  out.chain.gradient_dB0_dx = r.number("chain", "dBdx", 0, true);
  out.chain.temperature = r.number("chain", "T", 0, true);
  out.chain.chain_axis_angle_theta =
      r.number("chain", "theta", constants::pi / 2.0, false);

  // plan values of 0 (or absent) select the chain-derived defaults
  out.plan.f_nR_onequbit = r.number("plan", "f_nR_onequbit", 0, false);
  out.plan.f_nR_gate = r.number("plan", "f_nR_gate", 0, false);
  out.plan.f_eR = r.number("plan", "f_eR", 0, false);
  out.t1e = r.number("plan", "t1e", 0.1, false);

  out.readout.modulation_depth = r.number("readout", "depth", out.readout.modulation_depth, false);
  out.readout.noise_sigma = r.number("readout", "noise", out.readout.noise_sigma, false);
  out.readout.sample_rate = r.number("readout", "sample_rate", out.readout.sample_rate, false);
  out.readout.n_samples =
      static_cast<int>(r.integer("readout", "n_samples", out.readout.n_samples, false));
  out.readout.mixdown_frequency =
      r.number("readout", "mixdown", out.readout.mixdown_frequency, false);
  out.readout.snr_threshold =
      r.number("readout", "snr_threshold", out.readout.snr_threshold, false);

  r.reject_unknown();

  try {
    out.chain.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }

  // defaults stay positive even for degenerate layouts (zero gradient, magic
  // angle) so the budget audit can run and report the failure itself
  if (out.plan.f_nR_onequbit <= 0) {
    const double step = std::abs(out.chain.species.gamma_n_over_2pi) *
                        out.chain.gradient_dB0_dx * out.chain.spacing_a;
    out.plan.f_nR_onequbit = step > 0 ? step / 40.0 : 100.0;
  }
  if (out.plan.f_nR_gate <= 0) {
    const double f_nd = bulk_f_nd(out.chain);
    out.plan.f_nR_gate = f_nd > 0 ? default_gate_rabi(f_nd) : 100.0;
  }
  if (out.plan.f_eR <= 0) out.plan.f_eR = 1e5;
  if (out.t1e <= 0) throw ConfigError("invalid configuration: plan.t1e must be > 0");

  out.hash = config_hash(raw);
  return out;
}

}  // namespace stmqc
