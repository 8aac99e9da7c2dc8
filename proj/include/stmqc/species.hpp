#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "stmqc/constants.hpp"

namespace stmqc {

// one electron-nuclear spin pair type (S = 1/2, I = 1/2)
struct IonSpecies {
  std::string name;
  double g_e = 2.0;                  // electron g-factor
  double gamma_n_over_2pi = 0.0;     // nuclear gyromagnetic ratio / 2pi, Hz/T, signed
  double hyperfine_A_over_h = 0.0;   // contact hyperfine constant A/h, Hz

  // electron precession frequency g_e * mu_B * b / h, Hz
  double electron_zeeman_hz(double b_tesla) const {
    return g_e * constants::bohr_magneton * b_tesla / constants::planck_h;
  }

  // bare nuclear precession frequency |gamma_n/2pi| * b, Hz
  double nuclear_zeeman_hz(double b_tesla) const {
    return std::abs(gamma_n_over_2pi) * b_tesla;
  }

  void validate() const {
    if (g_e <= 0) throw std::invalid_argument("species: g_e must be > 0");
    if (hyperfine_A_over_h <= 0)
      throw std::invalid_argument("species: hyperfine_A_over_h must be > 0");
    if (gamma_n_over_2pi == 0)
      throw std::invalid_argument("species: gamma_n_over_2pi must be nonzero");
  }
};

// 125Te+ donor in silicon. the nuclear moment is 0.882 nuclear magnetons on a
// spin-1/2 nucleus, so gamma_n/2pi = 2 * 0.882 * mu_N / h = 13.45 MHz/T;
// both moments are negative, hence the sign.
inline IonSpecies te125() {
  IonSpecies s;
  s.name = "125Te+";
  s.g_e = 2.0;
  s.gamma_n_over_2pi = -13.45e6;
  s.hyperfine_A_over_h = 3.5e9;
  return s;
}

}  // namespace stmqc
