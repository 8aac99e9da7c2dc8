#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "stmqc/chain.hpp"
#include "stmqc/constants.hpp"

namespace stmqc {

// secular dipolar frequency-shift magnitude that a single fully polarized
// electron spin at site j imposes on the nuclear transition at site k:
//   (mu0/4pi) * (g_e mu_B / 2) * |1 - 3 cos^2 theta| / r^3 * |gamma_n/2pi|
// with r = |j-k| * spacing_a. reference geometry gives ~100 Hz per nearest
// neighbor. the full coupling constant entering the hamiltonian (per unit
// s_j * i_k) is twice this value.
inline double dipole_shift(const ChainConfig& config, int source_site, int target_site) {
  if (source_site == target_site)
    throw std::domain_error("dipole_shift: source and target sites must differ");
  const double r = std::abs(source_site - target_site) * config.spacing_a;
  const double cos_t = std::cos(config.chain_axis_angle_theta);
  const double geom = std::abs(1.0 - 3.0 * cos_t * cos_t);
  return constants::vacuum_permeability_over_4pi *
         (config.species.g_e * constants::bohr_magneton / 2.0) * geom / (r * r * r) *
         std::abs(config.species.gamma_n_over_2pi);
}

// hamiltonian coupling constant b_jk in H/h += b_jk * s_j * i_k
inline double dipole_coupling(const ChainConfig& config, int source_site, int target_site) {
  return 2.0 * dipole_shift(config, source_site, target_site);
}

namespace detail {

// sum_{m>=2} 1/m^3 by explicit summation, smallest terms first
inline double far_neighbor_lattice_sum(int n_terms = 100000) {
  double acc = 0.0;
  for (int m = n_terms + 1; m >= 2; --m) {
    const double dm = static_cast<double>(m);
    acc += 1.0 / (dm * dm * dm);
  }
  return acc;
}

}  // namespace detail

// nuclear-frequency dipole splitting from one nearest-neighbor electron flip,
// bulk convention (sum of the shift over the two polarization signs)
inline double bulk_f_nd(const ChainConfig& config) {
  ChainConfig pair = config;
  pair.n_ions = 2;
  return 2.0 * dipole_shift(pair, 0, 1);
}

// combined splitting from all electrons beyond the nearest neighbor on one
// side of a long chain: f_nd * sum_{m>=2} 1/m^3 = f_nd * (zeta(3) - 1)
inline double bulk_f_nd_prime(const ChainConfig& config) {
  return bulk_f_nd(config) * detail::far_neighbor_lattice_sum();
}

// per-site variants from the actual finite geometry: splitting caused by one
// adjacent electron flip, and the summed coupling of all non-adjacent ions
inline double site_f_nd(const ChainConfig& config, int k) {
  if (config.n_ions < 2) return 0.0;
  const int neighbor = (k + 1 < config.n_ions) ? k + 1 : k - 1;
  return dipole_coupling(config, neighbor, k);
}

inline double site_f_nd_prime(const ChainConfig& config, int k) {
  double acc = 0.0;
  for (int j = config.n_ions - 1; j >= 0; --j)
    if (std::abs(j - k) >= 2) acc += dipole_coupling(config, j, k);
  return acc;
}

// per-site transition frequencies and chain-level frequency differences
struct FrequencyTable {
  std::vector<double> field_b;           // T
  std::vector<double> f_e0;              // electron transition, nuclear ground, Hz
  std::vector<double> f_e1;              // electron transition, nuclear excited, Hz
  std::vector<double> f_n;               // bare nuclear frequency, Hz
  std::vector<double> site_f_nd;         // nearest-neighbor dipole splitting, Hz
  std::vector<double> site_f_nd_prime;   // non-nearest dipole sum, Hz
  double delta_f_e = 0.0;                // electron frequency step per site, Hz
  double delta_f_n = 0.0;                // nuclear frequency step per site, Hz
  double f_nd = 0.0;                     // bulk nearest-neighbor splitting, Hz
  double f_nd_prime = 0.0;               // bulk far-neighbor sum, Hz

  int n_sites() const { return static_cast<int>(field_b.size()); }
};

inline FrequencyTable build_frequency_table(const ChainConfig& config) {
  config.validate();
  const double a_h = config.species.hyperfine_A_over_h;
  FrequencyTable t;
  t.field_b.reserve(config.n_ions);
  for (int k = 0; k < config.n_ions; ++k) {
    const double b = config.field_at_site(k);
    t.field_b.push_back(b);
    const double fe = config.species.electron_zeeman_hz(b);
    t.f_e0.push_back(fe + a_h / 2.0);
    t.f_e1.push_back(fe - a_h / 2.0);
    t.f_n.push_back(config.species.nuclear_zeeman_hz(b));
    t.site_f_nd.push_back(site_f_nd(config, k));
    t.site_f_nd_prime.push_back(site_f_nd_prime(config, k));
  }
  const double field_step = config.gradient_dB0_dx * config.spacing_a;
  t.delta_f_e = config.species.g_e * constants::bohr_magneton * field_step / constants::planck_h;
  t.delta_f_n = std::abs(config.species.gamma_n_over_2pi) * field_step;
  t.f_nd = bulk_f_nd(config);
  t.f_nd_prime = bulk_f_nd_prime(config);
  return t;
}

// physical transition frequency of ion k's electron, H/h gap for the electron
// flip given nuclear spin-z values iz (expectations allowed, entries in
// [-1/2, +1/2]): f_e(B_k) - (A/h) iz_k + sum_{j != k} b_kj iz_j.
// returned as a magnitude; see the evolve header for the label convention.
inline double electron_transition_frequency(const ChainConfig& config, int k,
                                            const std::vector<double>& iz) {
  double f = config.species.electron_zeeman_hz(config.field_at_site(k)) -
             config.species.hyperfine_A_over_h * iz[static_cast<size_t>(k)];
  for (int j = 0; j < config.n_ions; ++j)
    if (j != k) f += dipole_coupling(config, k, j) * iz[static_cast<size_t>(j)];
  return std::abs(f);
}

// physical transition frequency of ion k's nucleus given electron spin-z
// values sz: f_n(B_k) - (A/h) sz_k + sum_{j != k} b_jk sz_j
inline double nuclear_transition_frequency(const ChainConfig& config, int k,
                                           const std::vector<double>& sz) {
  double f = config.species.nuclear_zeeman_hz(config.field_at_site(k)) -
             config.species.hyperfine_A_over_h * sz[static_cast<size_t>(k)];
  for (int j = 0; j < config.n_ions; ++j)
    if (j != k) f += dipole_coupling(config, j, k) * sz[static_cast<size_t>(j)];
  return std::abs(f);
}

}  // namespace stmqc
