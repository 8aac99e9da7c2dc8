#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stmqc/chain.hpp"
#include "stmqc/evolve.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/pulse.hpp"
#include "stmqc/readout.hpp"
#include "stmqc/rng.hpp"
#include "stmqc/state.hpp"

namespace stmqc {

// execution record of one protocol run
struct ProtocolStep {
  std::string label;
  double frequency = 0.0;  // carrier assignment, Hz
};

struct ProtocolReport {
  std::string protocol;
  std::vector<ProtocolStep> step_frequencies;
  PulseSequence sequence;
  std::vector<int> outcome_bits;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> warnings;
  bool aborted = false;
  double wall_model_duration = 0.0;  // s, sum of pulse/delay durations

  void finalize_duration() { wall_model_duration = sequence.total_duration(); }

  const double* metric(const std::string& name) const {
    for (const auto& [k, v] : metrics)
      if (k == name) return &v;
    return nullptr;
  }
};

// equilibrium excited-state population of a two-level electron at field b:
// e^-x / (1 + e^-x), x = h f_e / k_B T; ~1.5e-6 at 10 T, 1 K, justifying the
// polarized-electron preconditions below
inline double thermal_electron_excited_population(const IonSpecies& species, double b_tesla,
                                                  double temperature) {
  const double x = constants::planck_h * species.electron_zeeman_hz(b_tesla) /
                   (constants::boltzmann_k * temperature);
  const double e = std::exp(-x);
  return e / (1.0 + e);
}

namespace detail {

inline void require_polarized_electrons(const ChainState& state, const ChainConfig& config,
                                        const char* who) {
  for (int k = 0; k < config.n_ions; ++k)
    if (electron_excited_probability(state, k) > 1e-6)
      throw std::runtime_error(std::string(who) +
                               ": electron subsystem must start in its ground state");
}

// all-electrons-ground spin-z assignments for carrier computation
inline std::vector<double> ground_sz(int n_ions) {
  return std::vector<double>(static_cast<std::size_t>(n_ions), -0.5);
}

inline std::vector<double> zero_iz(int n_ions) {
  return std::vector<double>(static_cast<std::size_t>(n_ions), 0.0);
}

}  // namespace detail

// default one-qubit / initialization nuclear Rabi frequency: a fortieth of
// the site-to-site nuclear spacing keeps worst-case neighbor transfer below
// 7e-4 even with dipole-shifted detunings
inline double default_onequbit_rabi(const ChainConfig& config) {
  const double step =
      std::abs(config.species.gamma_n_over_2pi) * config.gradient_dB0_dx * config.spacing_a;
  if (step <= 0)
    throw std::invalid_argument("default_onequbit_rabi: needs a nonzero field gradient");
  return step / 40.0;
}

// default conditional-gate nuclear Rabi frequency: f_nd / sqrt(63), the
// synchronized choice at which the detuned (control-ground) branch completes
// exactly four full generalized-Rabi cycles during the pi-pulse and returns
// with zero transfer; see cn_gate
inline double default_gate_rabi(double f_nd) { return f_nd / std::sqrt(63.0); }

// ---------------------------------------------------------------------------
// one-qubit rotation

struct RotationResult {
  ChainState state;
  ProtocolReport report;
};

// rotation by `angle` about the equatorial axis at `phase` on the nuclear
// spin of one site, via a single rectangular pulse at the site's shifted NMR
// frequency. reported fidelity compares against the ideal site-local rotation
// composed with bare diagonal evolution, with the pulse's rotating-frame
// axis convention; it is 1 up to floating-point error for a lone ion and
// degrades with neighbor leakage on chains.
inline RotationResult one_qubit_rotation(const ChainState& state, int site, double angle,
                                         double phase, const ChainConfig& config,
                                         double nuclear_rabi = 0.0) {
  config.validate_simulable();
  if (site < 0 || site >= config.n_ions)
    throw std::out_of_range("one_qubit_rotation: site out of range");
  if (angle <= 0) throw std::invalid_argument("one_qubit_rotation: angle must be > 0");

  RotationResult res;
  res.report.protocol = "one_qubit_rotation";
  const double f_r = nuclear_rabi > 0 ? nuclear_rabi : default_onequbit_rabi(config);
  const double delta_f_n =
      std::abs(config.species.gamma_n_over_2pi) * config.gradient_dB0_dx * config.spacing_a;
  if (config.n_ions > 1 && f_r >= delta_f_n)
    res.report.warnings.push_back("nuclear Rabi frequency " + std::to_string(f_r) +
                                  " Hz is not below the site spacing " +
                                  std::to_string(delta_f_n) + " Hz; selectivity is lost");

  // sz from the state's electron expectations; equals the polarized static
  // shift when the electrons are in their ground state
  std::vector<double> sz(static_cast<std::size_t>(config.n_ions));
  for (int j = 0; j < config.n_ions; ++j)
    sz[static_cast<std::size_t>(j)] = electron_sz_expectation(state, j);
  const double carrier = nuclear_transition_frequency(config, site, sz);

  PulseSpec p;
  p.channel = Channel::nuclear;
  p.carrier_frequency = carrier;
  p.rabi_frequency = f_r;
  p.phase = phase;
  p.duration = angle / (2.0 * constants::pi * f_r);
  res.report.step_frequencies.push_back({"nuclear rotation carrier", carrier});
  res.report.sequence.steps.emplace_back(p);

  res.state = evolve_pulse(state, p, config);

  // reference: exact axis-angle rotation on the site, then diagonal phases
  const double phase_eff =
      phase + 2.0 * constants::pi * carrier * state.time_s;  // frame-spliced axis
  ChainState ideal = state;
  const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
  const std::complex<double> up_factor = std::complex<double>(0, -1.0) * s *
                                         std::polar(1.0, -phase_eff);
  const std::complex<double> dn_factor = std::complex<double>(0, -1.0) * s *
                                         std::polar(1.0, +phase_eff);
  for (std::int64_t idx = 0; idx < ideal.dimension(); ++idx) {
    if (nuclear_bit(idx, site) == 0) {
      const std::int64_t up = flip_nucleus(idx, site);
      const auto ag = ideal.amplitudes(idx);
      const auto ae = ideal.amplitudes(up);
      ideal.amplitudes(idx) = c * ag + up_factor * ae;
      ideal.amplitudes(up) = dn_factor * ag + c * ae;
    }
  }
  ideal = evolve_free(ideal, p.duration, config);
  res.report.metrics.emplace_back("rotation_fidelity", state_overlap(ideal, res.state));
  res.report.finalize_duration();
  return res;
}

// ---------------------------------------------------------------------------
// chain initialization

struct InitParams {
  ReadoutParams readout;
  double nuclear_rabi_frequency = 0.0;  // 0 = default_onequbit_rabi
};

struct InitializationResult {
  ChainState state;
  ProtocolReport report;
};

// drive every nuclear spin to its ground state: read each site's modulation
// frequency and flip the sites found excited with selective pi-pulses. aborts
// with a partial report when a readout comes back indeterminate.
inline InitializationResult initialize_chain(const ChainState& state, const ChainConfig& config,
                                             const InitParams& params, SeededRng& rng) {
  config.validate_simulable();
  detail::require_polarized_electrons(state, config, "initialize_chain");
  InitializationResult res{state, {}};
  res.report.protocol = "initialize_chain";
  const double f_r = params.nuclear_rabi_frequency > 0 ? params.nuclear_rabi_frequency
                                                       : default_onequbit_rabi(config);
  const auto sz = detail::ground_sz(config.n_ions);
  int pulses = 0;
  for (int k = 0; k < config.n_ions; ++k) {
    const MeasurementResult m = measure_nuclear(res.state, k, config, params.readout, rng);
    if (!m.valid) {
      res.report.warnings.push_back("readout at site " + std::to_string(k) +
                                    " was indeterminate; aborting");
      res.report.aborted = true;
      res.report.finalize_duration();
      return res;
    }
    res.state = m.state;
    res.report.outcome_bits.push_back(m.bit);
    if (m.bit == 1) {
      const double carrier = nuclear_transition_frequency(config, k, sz);
      const PulseSpec p = pi_pulse(Channel::nuclear, carrier, f_r);
      res.report.step_frequencies.push_back(
          {"site " + std::to_string(k) + " corrective pi carrier", carrier});
      res.report.sequence.steps.emplace_back(p);
      res.state = evolve_pulse(res.state, p, config);
      ++pulses;
    }
  }
  double p_all_ground = 0.0;
  for (std::int64_t idx = 0; idx < res.state.dimension(); ++idx) {
    bool ground = true;
    for (int k = 0; k < config.n_ions && ground; ++k)
      if (nuclear_bit(idx, k)) ground = false;
    if (ground) p_all_ground += res.state.probability(idx);
  }
  res.report.metrics.emplace_back("pulses_issued", pulses);
  res.report.metrics.emplace_back("all_nuclear_ground_probability", p_all_ground);
  res.report.finalize_duration();
  return res;
}

inline InitializationResult initialize_chain(const ChainState& state, const ChainConfig& config,
                                             const InitParams& params, std::uint64_t seed) {
  SeededRng rng(seed);
  return initialize_chain(state, config, params, rng);
}

// ---------------------------------------------------------------------------
// gate fidelity against the ideal Control-Not

// ideal CNOT on the nuclear pair (control, target): amplitude permutation
inline ChainState ideal_cnot(const ChainState& state, int control, int target) {
  ChainState out = state;
  for (std::int64_t idx = 0; idx < out.dimension(); ++idx) {
    if (nuclear_bit(idx, control) == 1 && nuclear_bit(idx, target) == 0) {
      const std::int64_t partner = flip_nucleus(idx, target);
      std::swap(out.amplitudes(idx), out.amplitudes(partner));
    }
  }
  return out;
}

namespace detail {

// overlap sums o(alpha, beta) = a + b e^{i alpha} + c e^{i beta} + d e^{i(alpha+beta)}
// grouped by the (control, target) nuclear bits of each basis index
struct FrameOverlap {
  std::complex<double> a{}, b{}, c{}, d{};

  static FrameOverlap of(const ChainState& ideal, const ChainState& achieved, int control,
                         int target) {
    FrameOverlap o;
    for (std::int64_t idx = 0; idx < ideal.dimension(); ++idx) {
      const auto term = std::conj(ideal.amplitudes(idx)) * achieved.amplitudes(idx);
      const int nc = nuclear_bit(idx, control), nt = nuclear_bit(idx, target);
      (nc ? (nt ? o.d : o.b) : (nt ? o.c : o.a)) += term;
    }
    return o;
  }

  std::complex<double> eval(std::complex<double> x, std::complex<double> y) const {
    return a + b * x + c * y + d * x * y;
  }
};

// mean |o_i|^2 maximized over the control z-phase in closed form, leaving a
// smooth 1-d problem in the target z-phase solved by scan plus refinement
struct FrameObjective {
  const std::vector<FrameOverlap>& overlaps;

  // returns (mean fidelity, optimal alpha) for fixed beta
  std::pair<double, double> at_beta(double beta) const {
    const std::complex<double> y = std::polar(1.0, beta);
    double base = 0.0;
    std::complex<double> cross{};
    for (const auto& o : overlaps) {
      const std::complex<double> p = o.a + o.c * y;
      const std::complex<double> q = o.b + o.d * y;
      base += std::norm(p) + std::norm(q);
      cross += std::conj(p) * q;
    }
    const double mean = (base + 2.0 * std::abs(cross)) / static_cast<double>(overlaps.size());
    return {mean, -std::arg(cross)};
  }
};

struct FrameFit {
  double fidelity = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

inline FrameFit maximize_over_frames(const std::vector<FrameOverlap>& overlaps) {
  const FrameObjective f{overlaps};
  const int coarse = 1024;
  FrameFit best;
  for (int i = 0; i < coarse; ++i) {
    const double beta = 2.0 * constants::pi * i / coarse;
    const auto [val, alpha] = f.at_beta(beta);
    if (val > best.fidelity) best = {val, alpha, beta};
  }
  double step = 2.0 * constants::pi / coarse;
  for (int round = 0; round < 40; ++round) {
    step /= 2.0;
    for (const double beta : {best.beta - step, best.beta + step}) {
      const auto [val, alpha] = f.at_beta(beta);
      if (val > best.fidelity) best = {val, alpha, beta};
    }
  }
  return best;
}

}  // namespace detail

// overlap |<ideal| Z_c(alpha) Z_t(beta) |achieved>|^2 maximized over the two
// per-qubit z-phase frames (bare diagonal evolution is a z-phase on every
// nucleus in the polarized-electron sector, so fixed frames would measure
// bookkeeping instead of gate error)
inline double frame_optimized_overlap(const ChainState& ideal, const ChainState& achieved,
                                      int control, int target) {
  std::vector<detail::FrameOverlap> o{detail::FrameOverlap::of(ideal, achieved, control, target)};
  return detail::maximize_over_frames(o).fidelity;
}

struct GateFidelityResult {
  double mean_fidelity = 0.0;
  std::vector<double> probe_fidelities;  // 16 entries, probe-major
  double frame_alpha = 0.0;              // fitted control z-phase, rad
  double frame_beta = 0.0;               // fitted target z-phase, rad
};

// the 16 informationally sufficient probes {|0>, |1>, |+>, |+i>} x {same} on
// the two nuclear qubits, everything else ground
inline std::vector<ChainState> fidelity_probes(int n_ions, int control, int target) {
  using cd = std::complex<double>;
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<std::pair<cd, cd>> kets = {
      {1.0, 0.0}, {0.0, 1.0}, {r, r}, {r, cd(0.0, r)}};
  std::vector<ChainState> probes;
  probes.reserve(16);
  for (const auto& [c0, c1] : kets) {
    for (const auto& [t0, t1] : kets) {
      ChainState s = all_ground_state(n_ions);
      s.amplitudes(0) = 0.0;
      const std::int64_t base = 0;
      for (int nc = 0; nc < 2; ++nc) {
        for (int nt = 0; nt < 2; ++nt) {
          std::int64_t idx = base;
          if (nc) idx = flip_nucleus(idx, control);
          if (nt) idx = flip_nucleus(idx, target);
          s.amplitudes(idx) = (nc ? c1 : c0) * (nt ? t1 : t0);
        }
      }
      probes.push_back(std::move(s));
    }
  }
  return probes;
}

// mean probe overlap between a transform and the ideal CNOT, jointly
// maximized over the two z-phase frames shared by all probes. 1.0 exactly
// when the transform equals CNOT up to a global phase (and per-qubit
// z-frames, reported as the fitted angles).
template <typename Transform>
GateFidelityResult gate_fidelity(Transform&& achieved_transform, int control, int target,
                                 const ChainConfig& config) {
  const auto probes = fidelity_probes(config.n_ions, control, target);
  std::vector<detail::FrameOverlap> overlaps;
  std::vector<ChainState> ideals, outs;
  overlaps.reserve(probes.size());
  for (const auto& probe : probes) {
    ChainState out = achieved_transform(probe);
    if (std::abs(out.norm() - 1.0) > 1e-6)
      throw std::runtime_error("gate_fidelity: transform returned a non-normalized state");
    ChainState ideal = ideal_cnot(probe, control, target);
    overlaps.push_back(detail::FrameOverlap::of(ideal, out, control, target));
  }
  const detail::FrameFit fit = detail::maximize_over_frames(overlaps);
  GateFidelityResult res;
  res.mean_fidelity = fit.fidelity;
  res.frame_alpha = fit.alpha;
  res.frame_beta = fit.beta;
  const std::complex<double> x = std::polar(1.0, fit.alpha);
  const std::complex<double> y = std::polar(1.0, fit.beta);
  res.probe_fidelities.reserve(overlaps.size());
  for (const auto& o : overlaps) res.probe_fidelities.push_back(std::norm(o.eval(x, y)));
  return res;
}

// ---------------------------------------------------------------------------
// Control-Not gate

struct GateSpec {
  int control_site = 0;
  int target_site = 1;
  double nuclear_rabi_frequency = 0.0;   // Hz; 0 = default_gate_rabi(f_nd)
  double electron_rabi_frequency = 1e5;  // Hz
  // step 3 restores the control electron; by default its carrier tracks the
  // dipole field of a target nucleus that arrived excited, `naive` repeats
  // the step-1 carrier unchanged. the two differ by the ~200 Hz nearest-
  // neighbor coupling -- far inside any practical electron linewidth -- and
  // with a superposed target neither is exact; both are kept inspectable.
  bool step3_naive = false;
  bool report_process_fidelity = true;

  void validate(const ChainConfig& config) const {
    if (control_site < 0 || control_site >= config.n_ions || target_site < 0 ||
        target_site >= config.n_ions)
      throw std::out_of_range("gate: site out of range");
    if (std::abs(control_site - target_site) != 1)
      throw std::invalid_argument("gate: control and target must be nearest neighbors");
    if (nuclear_rabi_frequency < 0 || electron_rabi_frequency <= 0)
      throw std::invalid_argument("gate: rabi frequencies must be positive");
  }
};

struct GateResult {
  ChainState state;
  ProtocolReport report;
};

// three-step Control-Not between neighboring nuclear spins:
//   1. electron pi-pulse at the control's nuclear-excited transition --
//      the electron flips only where the control nucleus is excited
//   2. nuclear pi-pulse at the target's transition conditioned on that
//      flipped electron; the control-ground branch sits f_nd away and, at
//      the synchronized default Rabi f_nd/sqrt(63), returns exactly to
//      where it started
//   3. electron pi-pulse restoring the control electron
// carriers are computed from the chain model: the step-2 assignment is the
// target's transition with the control electron excited and every other
// electron ground; electron carriers take nuclear dipole terms at their
// midpoint (the +-100 Hz spread is invisible at electron Rabi scales).
inline GateResult cn_gate(const ChainState& state, const GateSpec& gate,
                          const ChainConfig& config) {
  config.validate_simulable();
  gate.validate(config);
  detail::require_polarized_electrons(state, config, "cn_gate");

  GateResult res;
  res.report.protocol = "cn_gate";
  const int c = gate.control_site, t = gate.target_site;
  const double f_nd_site = dipole_coupling(config, c, t);
  const double f_nr =
      gate.nuclear_rabi_frequency > 0 ? gate.nuclear_rabi_frequency : default_gate_rabi(f_nd_site);
  if (f_nr >= f_nd_site)
    res.report.warnings.push_back(
        "gate nuclear Rabi frequency " + std::to_string(f_nr) +
        " Hz is not below the conditional splitting " + std::to_string(f_nd_site) +
        " Hz; the target flips regardless of the control");

  // step 1: flip the control electron where the control nucleus is excited
  auto iz = detail::zero_iz(config.n_ions);
  iz[static_cast<std::size_t>(c)] = +0.5;
  const double carrier1 = electron_transition_frequency(config, c, iz);

  // step 2: flip the target nucleus where the control electron flipped
  auto sz = detail::ground_sz(config.n_ions);
  sz[static_cast<std::size_t>(c)] = +0.5;
  const double carrier2 = nuclear_transition_frequency(config, t, sz);

  // step 3: restore the control electron
  double carrier3 = carrier1;
  if (!gate.step3_naive) {
    auto iz3 = iz;
    iz3[static_cast<std::size_t>(t)] = +0.5;
    carrier3 = electron_transition_frequency(config, c, iz3);
  }

  const PulseSpec p1 = pi_pulse(Channel::electron, carrier1, gate.electron_rabi_frequency);
  const PulseSpec p2 = pi_pulse(Channel::nuclear, carrier2, f_nr);
  const PulseSpec p3 = pi_pulse(Channel::electron, carrier3, gate.electron_rabi_frequency);
  res.report.step_frequencies.push_back({"step 1 electron carrier", carrier1});
  res.report.step_frequencies.push_back({"step 2 nuclear carrier", carrier2});
  res.report.step_frequencies.push_back({"step 3 electron carrier", carrier3});
  res.report.sequence.steps.emplace_back(p1);
  res.report.sequence.steps.emplace_back(p2);
  res.report.sequence.steps.emplace_back(p3);

  res.state = run_sequence(state, res.report.sequence, config);

  res.report.metrics.emplace_back("electron_excited_control",
                                  electron_excited_probability(res.state, c));
  res.report.metrics.emplace_back("nuclear_rabi_frequency", f_nr);
  if (gate.report_process_fidelity) {
    const auto fid = gate_fidelity(
        [&](const ChainState& probe) { return run_sequence(probe, res.report.sequence, config); },
        c, t, config);
    res.report.metrics.emplace_back("process_fidelity", fid.mean_fidelity);
    res.report.metrics.emplace_back("frame_alpha", fid.frame_alpha);
    res.report.metrics.emplace_back("frame_beta", fid.frame_beta);
  }
  res.report.finalize_duration();
  return res;
}

}  // namespace stmqc
