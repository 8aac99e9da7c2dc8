#pragma once

#include <cstdint>

namespace stmqc {

// computational basis for a chain of n electron-nuclear pairs.
// a basis index packs 2n bits, site-major: bit 2k = electron of ion k,
// bit 2k+1 = nucleus of ion k; bit value 0 = ground, 1 = excited.
// index 0 is the all-ground state.

inline std::int64_t chain_dimension(int n_ions) {
  return std::int64_t{1} << (2 * n_ions);
}

inline int electron_bit(std::int64_t basis_index, int ion) {
  return static_cast<int>((basis_index >> (2 * ion)) & 1);
}

inline int nuclear_bit(std::int64_t basis_index, int ion) {
  return static_cast<int>((basis_index >> (2 * ion + 1)) & 1);
}

// spin-z eigenvalue in units of hbar: ground -1/2, excited +1/2
inline double electron_sz(std::int64_t basis_index, int ion) {
  return electron_bit(basis_index, ion) - 0.5;
}

inline double nuclear_iz(std::int64_t basis_index, int ion) {
  return nuclear_bit(basis_index, ion) - 0.5;
}

inline std::int64_t flip_electron(std::int64_t basis_index, int ion) {
  return basis_index ^ (std::int64_t{1} << (2 * ion));
}

inline std::int64_t flip_nucleus(std::int64_t basis_index, int ion) {
  return basis_index ^ (std::int64_t{1} << (2 * ion + 1));
}

}  // namespace stmqc
