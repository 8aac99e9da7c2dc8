#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <variant>

#include "stmqc/basis.hpp"
#include "stmqc/chain.hpp"
#include "stmqc/hamiltonian.hpp"
#include "stmqc/pulse.hpp"
#include "stmqc/state.hpp"

// Unitary evolution in the multi-rotating frame under the rotating-wave
// approximation. A pulse on channel c with carrier f_c, Rabi frequency f_R
// and phase phi evolves the state by
//
//   U = P(-(t0 + tau)) exp(-i 2 pi G tau) P(t0),   P(t) = exp(+i 2 pi f_c t N)
//
// where N counts the excited spins of the driven channel, t0 is the state's
// model time, and the time-independent rotating-frame generator is
//
//   G = D - f_c N + (f_R / 2) sum_k (e^{-i phi} raise_k + e^{+i phi} lower_k).
//
// D is the secular chain diagonal, so free evolution is exp(-i 2 pi D t) and
// the P factors splice pulses into the same global phase convention at any
// start time. The drive couples every transition of its channel; selectivity
// comes only from detuning. Counter-rotating terms are dropped (relative
// weight f_R / f_carrier < 1e-6 in every regime treated here); one
// consequence of the positive-magnitude frequency convention is that a
// transition whose level gap is inverted (the nuclear gap inside the
// electron-excited manifold) is never resonant with a co-rotating drive --
// its detuning is of hyperfine order, so its dynamics are frozen, exactly as
// for any other far-detuned line.

namespace stmqc {

namespace detail {

inline std::int64_t channel_mask(Channel channel, int n_ions) {
  std::int64_t m = 0;
  for (int k = 0; k < n_ions; ++k)
    m |= std::int64_t{1} << (channel == Channel::electron ? 2 * k : 2 * k + 1);
  return m;
}

inline int channel_count(std::int64_t idx, std::int64_t mask) {
  return std::popcount(static_cast<std::uint64_t>(idx & mask));
}

// diagonal frame factor exp(sign * i 2 pi f_c t N); computed identically at
// a pulse's end and the next pulse's start so the factors cancel exactly
inline void apply_frame_phase(Eigen::VectorXcd& amps, double carrier, double t, int sign,
                              std::int64_t mask) {
  if (t == 0.0) return;
  const double cycles = carrier * t;
  for (std::int64_t idx = 0; idx < amps.size(); ++idx) {
    const int n = channel_count(idx, mask);
    if (n != 0)
      amps(idx) *= std::polar(1.0, sign * 2.0 * constants::pi * cycles * static_cast<double>(n));
  }
}

}  // namespace detail

inline ChainState evolve_free(const ChainState& state, double duration,
                              const ChainConfig& config) {
  if (duration < 0) throw std::invalid_argument("evolve_free: duration must be >= 0");
  if (state.dimension() != chain_dimension(config.n_ions))
    throw std::invalid_argument("evolve_free: state dimension does not match config");
  ChainState out = state;
  if (duration == 0.0) return out;
  const Eigen::VectorXd d = chain_diagonal(config);
  for (std::int64_t idx = 0; idx < out.dimension(); ++idx)
    out.amplitudes(idx) *= std::polar(1.0, -2.0 * constants::pi * d(idx) * duration);
  out.time_s += duration;
  return out;
}

inline ChainState evolve_pulse(const ChainState& state, const PulseSpec& pulse,
                               const ChainConfig& config) {
  pulse.validate();
  config.validate_simulable();
  if (state.dimension() != chain_dimension(config.n_ions))
    throw std::invalid_argument("evolve_pulse: state dimension does not match config");

  const auto dim = state.dimension();
  const std::int64_t mask = detail::channel_mask(pulse.channel, config.n_ions);
  const Eigen::VectorXd d = chain_diagonal(config);

  // rotating-frame generator
  // TODO cache the eigendecomposition per (config, channel, carrier, rabi);
  // repeated identical pulses currently re-solve it
  HamiltonianMatrix g = HamiltonianMatrix::Zero(dim, dim);
  for (std::int64_t idx = 0; idx < dim; ++idx)
    g(idx, idx) = d(idx) - pulse.carrier_frequency * detail::channel_count(idx, mask);
  const std::complex<double> half_drive =
      (pulse.rabi_frequency / 2.0) * std::polar(1.0, -pulse.phase);
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    for (int k = 0; k < config.n_ions; ++k) {
      const std::int64_t bit = std::int64_t{1} << (pulse.channel == Channel::electron ? 2 * k
                                                                                      : 2 * k + 1);
      if (!(idx & bit)) {
        const std::int64_t up = idx | bit;
        g(up, idx) += half_drive;             // raise
        g(idx, up) += std::conj(half_drive);  // lower
      }
    }
  }

  // shift out the common diagonal offset before exponentiating; the dynamic
  // range of the eigenphases (hence their rounding) shrinks by orders of
  // magnitude, and the offset returns as one exact global phase
  double lo = g(0, 0).real(), hi = g(0, 0).real();
  for (std::int64_t idx = 1; idx < dim; ++idx) {
    lo = std::min(lo, g(idx, idx).real());
    hi = std::max(hi, g(idx, idx).real());
  }
  const double e_ref = (lo + hi) / 2.0;
  for (std::int64_t idx = 0; idx < dim; ++idx) g(idx, idx) -= e_ref;

  Eigen::SelfAdjointEigenSolver<HamiltonianMatrix> solver(g);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("evolve_pulse: eigendecomposition failed");

  ChainState out = state;
  const double t0 = state.time_s;
  const double t_end = t0 + pulse.duration;

  detail::apply_frame_phase(out.amplitudes, pulse.carrier_frequency, t0, +1, mask);

  Eigen::VectorXcd coeffs = solver.eigenvectors().adjoint() * out.amplitudes;
  for (std::int64_t i = 0; i < dim; ++i)
    coeffs(i) *= std::polar(1.0, -2.0 * constants::pi * solver.eigenvalues()(i) * pulse.duration);
  out.amplitudes = solver.eigenvectors() * coeffs;
  out.amplitudes *= std::polar(1.0, -2.0 * constants::pi * e_ref * pulse.duration);

  detail::apply_frame_phase(out.amplitudes, pulse.carrier_frequency, t_end, -1, mask);
  out.time_s = t_end;
  return out;
}

inline ChainState run_sequence(const ChainState& state, const PulseSequence& seq,
                               const ChainConfig& config) {
  ChainState s = state;
  for (const auto& step : seq.steps) {
    if (std::holds_alternative<PulseSpec>(step))
      s = evolve_pulse(s, std::get<PulseSpec>(step), config);
    else
      s = evolve_free(s, std::get<FreeEvolution>(step).duration, config);
  }
  return s;
}

}  // namespace stmqc
