#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "stmqc/basis.hpp"
#include "stmqc/chain.hpp"

namespace stmqc {

// normalized amplitude vector over the 4^n product basis (see basis.hpp for
// the bit layout). carries the absolute model time so that multi-pulse
// protocols compose in consistent rotating frames.
struct ChainState {
  Eigen::VectorXcd amplitudes;
  int n_ions = 0;
  double time_s = 0.0;

  std::int64_t dimension() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }

  double probability(std::int64_t basis_index) const {
    return std::norm(amplitudes(basis_index));
  }
};

inline ChainState basis_state(int n_ions, std::int64_t basis_index) {
  if (n_ions < 1 || n_ions > kMaxIons)
    throw std::length_error("state: n_ions outside the simulable range");
  const auto dim = chain_dimension(n_ions);
  if (basis_index < 0 || basis_index >= dim)
    throw std::out_of_range("state: basis index out of range");
  ChainState s;
  s.n_ions = n_ions;
  s.amplitudes = Eigen::VectorXcd::Zero(dim);
  s.amplitudes(basis_index) = 1.0;
  return s;
}

inline ChainState all_ground_state(int n_ions) { return basis_state(n_ions, 0); }

// basis state from per-site bits (electron all ground unless given)
inline ChainState nuclear_basis_state(int n_ions, const std::vector<int>& nuclear_bits) {
  std::int64_t idx = 0;
  for (int k = 0; k < n_ions; ++k)
    if (nuclear_bits[static_cast<size_t>(k)]) idx = flip_nucleus(idx, k);
  return basis_state(n_ions, idx);
}

inline double electron_excited_probability(const ChainState& state, int ion) {
  double p = 0.0;
  for (std::int64_t idx = 0; idx < state.dimension(); ++idx)
    if (electron_bit(idx, ion)) p += state.probability(idx);
  return p;
}

inline double nuclear_excited_probability(const ChainState& state, int ion) {
  double p = 0.0;
  for (std::int64_t idx = 0; idx < state.dimension(); ++idx)
    if (nuclear_bit(idx, ion)) p += state.probability(idx);
  return p;
}

// <I_z> of one ion's nucleus, in [-1/2, +1/2]
inline double nuclear_iz_expectation(const ChainState& state, int ion) {
  return nuclear_excited_probability(state, ion) - 0.5;
}

inline double electron_sz_expectation(const ChainState& state, int ion) {
  return electron_excited_probability(state, ion) - 0.5;
}

namespace detail {

template <typename BitOf>
inline ChainState project_bit(const ChainState& state, int ion, int bit, BitOf&& bit_of) {
  ChainState out = state;
  double kept = 0.0;
  for (std::int64_t idx = 0; idx < state.dimension(); ++idx) {
    if (bit_of(idx, ion) == bit)
      kept += state.probability(idx);
    else
      out.amplitudes(idx) = 0.0;
  }
  if (kept <= 0.0) throw std::runtime_error("projection onto a zero-probability subspace");
  out.amplitudes /= std::sqrt(kept);
  return out;
}

}  // namespace detail

inline ChainState project_nucleus(const ChainState& state, int ion, int bit) {
  return detail::project_bit(state, ion, bit,
                             [](std::int64_t i, int k) { return nuclear_bit(i, k); });
}

inline ChainState project_electron(const ChainState& state, int ion, int bit) {
  return detail::project_bit(state, ion, bit,
                             [](std::int64_t i, int k) { return electron_bit(i, k); });
}

// |<a|b>|^2
inline double state_overlap(const ChainState& a, const ChainState& b) {
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

}  // namespace stmqc
