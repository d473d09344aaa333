#pragma once

namespace kerrcmm {

// Constants of the three-mode model: microwave cavity (a), magnon (m),
// phonon (b). All fields are angular quantities, rad/s; see units.hpp.
struct SystemParams {
  double omega_a = 0.0;       // cavity resonance
  double kappa_a = 0.0;       // total cavity linewidth (FWHM)
  double kappa_1 = 0.0;       // cavity decay through the drive port
  double kappa_2 = 0.0;       // cavity decay through the probe port
  double omega_m_bare = 0.0;  // zero-power magnon frequency, set by calibration
  double kappa_m = 0.0;       // magnon linewidth (FWHM)
  double omega_b = 0.0;       // bare mechanical frequency
  double kappa_b = 0.0;       // mechanical linewidth (FWHM)
  double g_ma = 0.0;          // cavity-magnon beam-splitter coupling
  double g_mb = 0.0;          // bare magnomechanical dispersive coupling
  double k_m = 0.0;           // magnon self-Kerr coefficient, rad/s per excitation
  double k_cross = 0.0;       // magnon-phonon cross-Kerr coefficient, rad/s per excitation
};

// Drive tone. power_dbm is the generator setting; attenuation_db is the net
// line loss between generator and cavity port. The loss is not measurable
// from inside the model, so calibration absorbs it; a negative value (net
// gain) is accepted for that reason.
struct DriveCondition {
  double omega_d = 0.0;        // drive frequency, rad/s
  double power_dbm = 0.0;      // source power, dBm
  double attenuation_db = 0.0; // line loss, dB
};

struct Detunings {
  double delta_a = 0.0;  // omega_a - omega_d
  double delta_m = 0.0;  // omega_m_bare - omega_d (bare, before Kerr dressing)
};

// Reference parameter set for the device this model targets, converted to
// angular units. omega_m_bare is left at zero: it depends on the bias field
// and must be fixed by calibrate_bare_frequency against an observed dressed
// frequency.
SystemParams reference_defaults();

// Plain subtractions of the stored frequencies; no hidden offsets.
Detunings detunings(const SystemParams& p, const DriveCondition& d);

// Power reaching the cavity port, watts: 10^((power_dbm - attenuation_db)/10) mW.
double effective_power_w(const DriveCondition& d);

// Drive amplitude epsilon_d = sqrt(P / (hbar * omega_d)), units s^(-1/2).
// Throws std::domain_error when omega_d <= 0.
double drive_amplitude_from_watts(double power_w, double omega_d);
double drive_amplitude(const DriveCondition& d);

// Sanity checks: finite fields, kappa_a/m/b > 0, port budget
// kappa_1 + kappa_2 <= kappa_a (the remainder is intrinsic loss), kappa_1/2 >= 0,
// g_ma/g_mb >= 0. Throws std::invalid_argument naming the offending field.
void validate(const SystemParams& p);

}  // namespace kerrcmm
