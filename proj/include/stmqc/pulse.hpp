#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stmqc/constants.hpp"
#include "stmqc/species.hpp"

namespace stmqc {

enum class Channel { electron, nuclear };

inline const char* channel_name(Channel c) {
  return c == Channel::electron ? "electron" : "nuclear";
}

// one rectangular rotating-field pulse
struct PulseSpec {
  Channel channel = Channel::nuclear;
  double carrier_frequency = 0.0;  // Hz
  double rabi_frequency = 0.0;     // Hz
  double phase = 0.0;              // rad
  double duration = 0.0;           // s

  void validate() const {
    if (rabi_frequency <= 0) throw std::invalid_argument("pulse: rabi_frequency must be > 0");
    if (duration <= 0) throw std::invalid_argument("pulse: duration must be > 0");
    if (carrier_frequency <= 0)
      throw std::invalid_argument("pulse: carrier_frequency must be > 0");
  }
};

struct FreeEvolution {
  double duration = 0.0;  // s
};

struct PulseSequence {
  std::vector<std::variant<PulseSpec, FreeEvolution>> steps;

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : steps)
      t += std::holds_alternative<PulseSpec>(s) ? std::get<PulseSpec>(s).duration
                                                : std::get<FreeEvolution>(s).duration;
    return t;
  }
};

inline double pi_pulse_duration(double f_r) {
  if (f_r <= 0) throw std::invalid_argument("pi_pulse_duration: rabi frequency must be > 0");
  return 1.0 / (2.0 * f_r);
}

inline PulseSpec pi_pulse(Channel channel, double carrier_hz, double rabi_hz,
                          double phase_rad = 0.0) {
  PulseSpec p;
  p.channel = channel;
  p.carrier_frequency = carrier_hz;
  p.rabi_frequency = rabi_hz;
  p.phase = phase_rad;
  p.duration = pi_pulse_duration(rabi_hz);
  return p;
}

inline bool is_pi_pulse(const PulseSpec& p) {
  return std::abs(p.duration * 2.0 * p.rabi_frequency - 1.0) <= 1e-9;
}

// rabi frequency of a rotating drive field of amplitude b_perp
inline double rabi_from_field(const IonSpecies& species, Channel channel, double b_perp) {
  if (b_perp <= 0) throw std::invalid_argument("rabi_from_field: b_perp must be > 0");
  if (channel == Channel::electron)
    return species.g_e * constants::bohr_magneton * b_perp / constants::planck_h;
  return std::abs(species.gamma_n_over_2pi) * b_perp;
}

// --- line-oriented text serialization --------------------------------------
// one step per line, decimal with 17 significant digits (round-trip exact):
//   pulse <electron|nuclear> <carrier_hz> <rabi_hz> <phase_rad> <duration_s>
//   delay <duration_s>
// blank lines and lines starting with '#' are skipped.

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_sequence(std::ostream& os, const PulseSequence& seq) {
  for (const auto& s : seq.steps) {
    if (std::holds_alternative<PulseSpec>(s)) {
      const auto& p = std::get<PulseSpec>(s);
      os << "pulse " << channel_name(p.channel) << ' ' << detail::fmt17(p.carrier_frequency)
         << ' ' << detail::fmt17(p.rabi_frequency) << ' ' << detail::fmt17(p.phase) << ' '
         << detail::fmt17(p.duration) << '\n';
    } else {
      os << "delay " << detail::fmt17(std::get<FreeEvolution>(s).duration) << '\n';
    }
  }
}

inline PulseSequence read_sequence(std::istream& is) {
  PulseSequence seq;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind) || kind[0] == '#') continue;
    const auto fail = [&](const std::string& what) {
      throw std::runtime_error("sequence line " + std::to_string(line_no) + ": " + what);
    };
    if (kind == "pulse") {
      std::string ch;
      PulseSpec p;
      if (!(ss >> ch >> p.carrier_frequency >> p.rabi_frequency >> p.phase >> p.duration))
        fail("expected: pulse <channel> <carrier> <rabi> <phase> <duration>");
      if (ch == "electron")
        p.channel = Channel::electron;
      else if (ch == "nuclear")
        p.channel = Channel::nuclear;
      else
        fail("unknown channel '" + ch + "'");
      seq.steps.emplace_back(p);
    } else if (kind == "delay") {
      FreeEvolution f;
      if (!(ss >> f.duration)) fail("expected: delay <duration>");
      if (f.duration < 0) fail("delay duration must be >= 0");
      seq.steps.emplace_back(f);
    } else {
      fail("unknown step kind '" + kind + "'");
    }
  }
  return seq;
}

}  // namespace stmqc
