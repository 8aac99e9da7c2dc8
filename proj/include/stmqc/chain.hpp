#pragma once

#include <stdexcept>
#include <string>

#include "stmqc/constants.hpp"
#include "stmqc/species.hpp"

namespace stmqc {

// full-state simulation is capped at 4^7 = 16384 amplitudes;
// frequency-budget planning carries no such cap.
inline constexpr int kMaxIons = 7;

// linear chain of identical ion sites in a graded magnetic field.
// site k sits at x = k * spacing_a, where B(x) = b0 + gradient_dB0_dx * x.
struct ChainConfig {
  int n_ions = 1;
  double spacing_a = 5e-9;        // inter-site spacing, m
  double b0 = 10.0;               // field at site 0, T
  double gradient_dB0_dx = 0.0;   // dB/dx, T/m
  double temperature = 1.0;       // K
  IonSpecies species;
  // angle between the chain axis and the field axis; pi/2 = chain in the
  // surface plane with the field normal to it
  double chain_axis_angle_theta = constants::pi / 2;

  double field_at_site(int k) const {
    if (k < 0 || k >= n_ions) throw std::out_of_range("chain: site index out of range");
    return b0 + gradient_dB0_dx * spacing_a * static_cast<double>(k);
  }

  void validate() const {
    species.validate();
    if (n_ions < 1) throw std::invalid_argument("chain: n_ions must be >= 1");
    if (spacing_a <= 0) throw std::invalid_argument("chain: spacing_a must be > 0");
    if (b0 <= 0) throw std::invalid_argument("chain: b0 must be > 0");
    if (temperature <= 0) throw std::invalid_argument("chain: temperature must be > 0");
    for (int k = 0; k < n_ions; ++k)
      if (field_at_site(k) <= 0)
        throw std::invalid_argument("chain: field must stay positive across the chain");
  }

  void validate_simulable() const {
    validate();
    if (n_ions > kMaxIons)
      throw std::length_error("chain: full-state simulation supports at most " +
                              std::to_string(kMaxIons) + " ions (4^n amplitudes)");
  }
};

// 3 tellurium donors, 5 nm apart, 10 T base field with a 1e5 T/m gradient, 1 K
inline ChainConfig reference_config(int n_ions = 3) {
  ChainConfig c;
  c.n_ions = n_ions;
  c.spacing_a = 5e-9;
  c.b0 = 10.0;
  c.gradient_dB0_dx = 1e5;
  c.temperature = 1.0;
  c.species = te125();
  return c;
}

}  // namespace stmqc
