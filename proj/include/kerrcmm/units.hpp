#pragma once

#include <cmath>
#include <stdexcept>

// Unit conventions for the whole library:
//   - every frequency, linewidth, coupling, and Kerr coefficient held by a
//     domain type is an ANGULAR quantity in rad/s;
//   - all external I/O (config files, CSV, CLI flags) uses linear Hz and dBm;
//   - conversion happens exactly once, at the I/O boundary, and is an exact
//     multiply/divide by 2*pi so no 2*pi factor can hide inside a module.
namespace kerrcmm::units {

inline constexpr double hbar = 1.054571817e-34;  // J*s
inline constexpr double two_pi = 6.283185307179586476925286766559;

constexpr double hz_to_rad(double hz) { return hz * two_pi; }
constexpr double rad_to_hz(double rad) { return rad / two_pi; }

// dBm is an absolute scale: 0 dBm = 1 mW.
inline double dbm_to_watts(double power_dbm) {
  return 1.0e-3 * std::pow(10.0, power_dbm / 10.0);
}

inline double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) {
    throw std::domain_error("watts_to_dbm: power must be positive");
  }
  return 10.0 * std::log10(watts / 1.0e-3);
}

}  // namespace kerrcmm::units
