#pragma once

#include <Eigen/Dense>

#include "stmqc/basis.hpp"
#include "stmqc/chain.hpp"
#include "stmqc/frequency_table.hpp"
#include "stmqc/species.hpp"

namespace stmqc {

// all hamiltonians are stored as H/h in Hz (joule-scale energies underflow
// double-precision dynamics over ms pulses)
using HamiltonianMatrix = Eigen::MatrixXcd;

// diagonal (secular) energy of one basis state, Hz:
//   sum_k f_e(B_k) s_k + f_n(B_k) i_k - (A/h) s_k i_k
//   + sum_{j != k} b_jk s_j i_k
inline double basis_energy(const ChainConfig& config, std::int64_t idx) {
  const double a_h = config.species.hyperfine_A_over_h;
  double e = 0.0;
  for (int k = 0; k < config.n_ions; ++k) {
    const double s = electron_sz(idx, k);
    const double i = nuclear_iz(idx, k);
    const double b = config.field_at_site(k);
    e += config.species.electron_zeeman_hz(b) * s + config.species.nuclear_zeeman_hz(b) * i -
         a_h * s * i;
    for (int j = 0; j < config.n_ions; ++j)
      if (j != k) e += dipole_coupling(config, j, k) * electron_sz(idx, j) * i;
  }
  return e;
}

// secular chain diagonal as a vector over the packed basis
inline Eigen::VectorXd chain_diagonal(const ChainConfig& config) {
  config.validate_simulable();
  const auto dim = chain_dimension(config.n_ions);
  Eigen::VectorXd d(dim);
  for (std::int64_t idx = 0; idx < dim; ++idx) d(idx) = basis_energy(config, idx);
  return d;
}

// exact 4x4 single-ion hamiltonian in the packed basis (bit 0 = electron,
// bit 1 = nucleus). the full form keeps the hyperfine flip-flop coupling
// -A/2h between |e1 n0> and |e0 n1>; the secular form drops it.
inline HamiltonianMatrix single_ion_hamiltonian(const IonSpecies& species, double b_tesla,
                                                bool secular = false) {
  ChainConfig one;
  one.n_ions = 1;
  one.b0 = b_tesla;
  one.gradient_dB0_dx = 0.0;
  one.species = species;
  HamiltonianMatrix h = HamiltonianMatrix::Zero(4, 4);
  for (std::int64_t idx = 0; idx < 4; ++idx) h(idx, idx) = basis_energy(one, idx);
  if (!secular) {
    const double a_h = species.hyperfine_A_over_h;
    h(1, 2) = -a_h / 2.0;
    h(2, 1) = -a_h / 2.0;
  }
  return h;
}

// n-ion chain hamiltonian: per-site single-ion terms plus secular
// electron-nuclear cross-site dipole couplings b_jk S_z^j I_z^k.
// the secular flag controls only the on-site hyperfine flip-flop terms;
// dipole couplings are always secular (Ising), and nuclear-nuclear dipole
// couplings are dropped entirely (a thousandfold weaker).
inline HamiltonianMatrix chain_hamiltonian(const ChainConfig& config, bool secular = true) {
  config.validate_simulable();
  const auto dim = chain_dimension(config.n_ions);
  HamiltonianMatrix h = HamiltonianMatrix::Zero(dim, dim);
  for (std::int64_t idx = 0; idx < dim; ++idx) h(idx, idx) = basis_energy(config, idx);
  if (!secular) {
    const double a_h = config.species.hyperfine_A_over_h;
    for (std::int64_t idx = 0; idx < dim; ++idx) {
      for (int k = 0; k < config.n_ions; ++k) {
        // flip-flop partner: electron excited + nucleus ground -> swapped
        if (electron_bit(idx, k) == 1 && nuclear_bit(idx, k) == 0) {
          const std::int64_t jdx = flip_nucleus(flip_electron(idx, k), k);
          h(idx, jdx) = -a_h / 2.0;
          h(jdx, idx) = -a_h / 2.0;
        }
      }
    }
  }
  return h;
}

}  // namespace stmqc
