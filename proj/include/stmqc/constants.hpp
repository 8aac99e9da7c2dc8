#pragma once

// CODATA 2018 values, SI units
namespace stmqc::constants {

inline constexpr double planck_h = 6.62607015e-34;                // J s (exact)
inline constexpr double bohr_magneton = 9.2740100783e-24;         // J/T
inline constexpr double nuclear_magneton = 5.0507837461e-27;      // J/T
inline constexpr double boltzmann_k = 1.380649e-23;               // J/K (exact)
inline constexpr double vacuum_permeability_over_4pi = 1e-7;      // T m/A (exact)
inline constexpr double pi = 3.14159265358979323846;

}  // namespace stmqc::constants
