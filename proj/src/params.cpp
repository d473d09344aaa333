#include "kerrcmm/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kerrcmm/units.hpp"

namespace kerrcmm {

using units::hz_to_rad;

SystemParams reference_defaults() {
  SystemParams p;
  p.omega_a = hz_to_rad(7.653e9);
  p.kappa_a = hz_to_rad(2.78e6);
  p.kappa_1 = hz_to_rad(0.22e6);
  p.kappa_2 = hz_to_rad(1.05e6);
  p.omega_m_bare = 0.0;  // set by calibration
  p.kappa_m = hz_to_rad(2.2e6);
  p.omega_b = hz_to_rad(11.0308e6);
  p.kappa_b = hz_to_rad(550.0);
  p.g_ma = hz_to_rad(7.37e6);
  p.g_mb = hz_to_rad(1.22e-3);
  p.k_m = hz_to_rad(-6.5e-9);
  p.k_cross = hz_to_rad(-5.4e-12);
  return p;
}

Detunings detunings(const SystemParams& p, const DriveCondition& d) {
  return Detunings{p.omega_a - d.omega_d, p.omega_m_bare - d.omega_d};
}

double effective_power_w(const DriveCondition& d) {
  return units::dbm_to_watts(d.power_dbm - d.attenuation_db);
}

double drive_amplitude_from_watts(double power_w, double omega_d) {
  if (!(omega_d > 0.0)) {
    throw std::domain_error("drive_amplitude: omega_d must be positive");
  }
  if (power_w < 0.0) {
    throw std::domain_error("drive_amplitude: power must be non-negative");
  }
  return std::sqrt(power_w / (units::hbar * omega_d));
}

double drive_amplitude(const DriveCondition& d) {
  return drive_amplitude_from_watts(effective_power_w(d), d.omega_d);
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("SystemParams: " + what);
}

}  // namespace

void validate(const SystemParams& p) {
  require(std::isfinite(p.omega_a) && p.omega_a >= 0.0, "omega_a must be finite and non-negative");
  require(std::isfinite(p.omega_m_bare) && p.omega_m_bare >= 0.0,
          "omega_m_bare must be finite and non-negative");
  require(std::isfinite(p.omega_b) && p.omega_b > 0.0, "omega_b must be finite and positive");
  require(std::isfinite(p.kappa_a) && p.kappa_a > 0.0, "kappa_a must be finite and positive");
  require(std::isfinite(p.kappa_m) && p.kappa_m > 0.0, "kappa_m must be finite and positive");
  require(std::isfinite(p.kappa_b) && p.kappa_b > 0.0, "kappa_b must be finite and positive");
  require(std::isfinite(p.kappa_1) && p.kappa_1 >= 0.0, "kappa_1 must be finite and non-negative");
  require(std::isfinite(p.kappa_2) && p.kappa_2 >= 0.0, "kappa_2 must be finite and non-negative");
  require(p.kappa_1 + p.kappa_2 <= p.kappa_a * (1.0 + 1e-12),
          "kappa_1 + kappa_2 must not exceed kappa_a (intrinsic loss is the remainder)");
  require(std::isfinite(p.g_ma) && p.g_ma >= 0.0, "g_ma must be finite and non-negative");
  require(std::isfinite(p.g_mb) && p.g_mb >= 0.0, "g_mb must be finite and non-negative");
  require(std::isfinite(p.k_m), "k_m must be finite");
  require(std::isfinite(p.k_cross), "k_cross must be finite");
}

}  // namespace kerrcmm
