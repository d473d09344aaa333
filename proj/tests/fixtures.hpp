#pragma once

#include "kerrcmm/params.hpp"
#include "kerrcmm/units.hpp"

// The two reference operating configurations used across the suite, matching
// configs/red_detuned.cfg and configs/blue_detuned.cfg: same device constants,
// different drive placement and calibrated bare magnon frequency.
namespace fixtures {

inline kerrcmm::SystemParams red_params() {
  auto p = kerrcmm::reference_defaults();
  p.omega_m_bare = kerrcmm::units::hz_to_rad(7656790647.0);
  return p;
}

inline kerrcmm::DriveCondition red_drive(double power_dbm = 29.7) {
  return {kerrcmm::units::hz_to_rad(7.645e9), power_dbm, -11.323393};
}

inline kerrcmm::SystemParams blue_params() {
  auto p = kerrcmm::reference_defaults();
  p.omega_m_bare = kerrcmm::units::hz_to_rad(7660925000.0);
  return p;
}

inline kerrcmm::DriveCondition blue_drive(double power_dbm = 23.7) {
  return {kerrcmm::units::hz_to_rad(7.66e9), power_dbm, -16.538107};
}

}  // namespace fixtures
