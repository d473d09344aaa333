#include "kerrcmm/response.hpp"

#include <cmath>
#include <complex>

#include "kerrcmm/errors.hpp"

namespace kerrcmm {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// chi(omega) = 1/[i(Delta - omega) + kappa/2] continued to complex omega.
std::complex<double> chi(double detuning, double kappa, std::complex<double> omega) {
  return 1.0 / (kI * (detuning - omega) + 0.5 * kappa);
}

std::complex<double> chi_ma_c(const OperatingPoint& op, std::complex<double> omega) {
  const std::complex<double> inv_m = kI * (op.delta_m_tilde - omega) + 0.5 * op.params.kappa_m;
  const std::complex<double> xa = chi(op.delta_a, op.params.kappa_a, omega);
  return 1.0 / (inv_m + op.params.g_ma * op.params.g_ma * xa);
}

// Xi(omega) = chi_ma(omega) - chi_ma*(-omega), continued analytically:
// for complex omega the mirror term becomes conj(chi_ma(-conj(omega))).
std::complex<double> xi_c(const OperatingPoint& op, std::complex<double> omega) {
  return chi_ma_c(op, omega) - std::conj(chi_ma_c(op, -std::conj(omega)));
}

// 2i|G|^2 Xi(omega): spring shift = -Re, linewidth change = +Im.
std::complex<double> backaction_kernel(const OperatingPoint& op, std::complex<double> omega) {
  const double g2 = std::norm(op.g_eff);
  return 2.0 * kI * g2 * xi_c(op, omega);
}

std::complex<double> chi_b_eff_inv_c(const OperatingPoint& op, std::complex<double> omega) {
  const std::complex<double> inv_b = kI * (op.omega_b_tilde - omega) + 0.5 * op.params.kappa_b;
  return inv_b - backaction_kernel(op, omega);
}

}  // namespace

OperatingPoint make_operating_point(const SystemParams& p, const DriveCondition& d,
                                    const SteadyBranch& branch) {
  OperatingPoint op;
  op.params = p;
  op.drive = d;
  op.branch = branch;
  const Detunings det = detunings(p, d);
  op.delta_a = det.delta_a;
  op.delta_m = det.delta_m;
  op.delta_m_tilde = det.delta_m + 2.0 * p.k_m * branch.occupation;
  op.omega_b_tilde = p.omega_b + p.k_cross * branch.occupation;
  op.g_eff = p.g_mb * branch.m_amp;
  return op;
}

std::complex<double> chi_a(const OperatingPoint& op, double omega) {
  return chi(op.delta_a, op.params.kappa_a, omega);
}

std::complex<double> chi_m(const OperatingPoint& op, double omega) {
  return chi(op.delta_m_tilde, op.params.kappa_m, omega);
}

std::complex<double> chi_b(const OperatingPoint& op, double omega) {
  return chi(op.omega_b_tilde, op.params.kappa_b, omega);
}

std::complex<double> chi_ma(const OperatingPoint& op, double omega) {
  return chi_ma_c(op, omega);
}

std::complex<double> chi_b_eff(const OperatingPoint& op, double omega) {
  return 1.0 / chi_b_eff_inv_c(op, omega);
}

ResponseResult evaluate_response(const OperatingPoint& op, EvalMode mode) {
  double omega = op.omega_b_tilde;
  if (mode == EvalMode::self_consistent) {
    for (int iter = 0; iter < 40; ++iter) {
      const std::complex<double> k = backaction_kernel(op, omega);
      const double next = op.omega_b_tilde - k.real();
      if (std::abs(next - omega) <= 1e-9 * std::max(std::abs(next), 1.0)) {
        omega = next;
        break;
      }
      omega = next;
    }
  }
  const std::complex<double> k = backaction_kernel(op, omega);
  ResponseResult r;
  r.spring_shift = -k.real();
  r.linewidth_change = k.imag();
  r.cross_kerr_shift = op.params.k_cross * op.branch.occupation;
  r.total_shift = r.spring_shift + r.cross_kerr_shift;
  r.evaluated_at = omega;
  return r;
}

double spring_shift(const OperatingPoint& op) {
  return evaluate_response(op).spring_shift;
}

double cross_kerr_shift(const OperatingPoint& op) {
  return op.params.k_cross * op.branch.occupation;
}

double linewidth_change(const OperatingPoint& op) {
  return evaluate_response(op).linewidth_change;
}

std::complex<double> phonon_pole(const OperatingPoint& op) {
  // Newton on chi_b_eff^-1(z) = 0 from the bare pole; numeric derivative with
  // a step far below every scale in the problem but far above rounding.
  std::complex<double> z{op.omega_b_tilde, -0.5 * op.params.kappa_b};
  for (int iter = 0; iter < 80; ++iter) {
    const std::complex<double> f = chi_b_eff_inv_c(op, z);
    const double h = std::max(1e-6 * std::abs(z), 1e-3);
    const std::complex<double> fp =
        (chi_b_eff_inv_c(op, z + h) - chi_b_eff_inv_c(op, z - h)) / (2.0 * h);
    if (fp == std::complex<double>{0.0, 0.0}) break;
    const std::complex<double> step = f / fp;
    z -= step;
    if (std::abs(step) <= 1e-10 * std::max(std::abs(z), 1.0)) {
      return z;
    }
  }
  if (std::abs(chi_b_eff_inv_c(op, z)) > 1e-6 * op.params.kappa_b) {
    throw NumericalError("phonon_pole: Newton iteration did not converge");
  }
  return z;
}

namespace {

std::vector<std::complex<double>> reflection_impl(const OperatingPoint& op,
                                                  const std::vector<double>& delta_pd,
                                                  bool include_self_energy) {
  const double g2_ma = op.params.g_ma * op.params.g_ma;
  const double g2_eff = include_self_energy ? std::norm(op.g_eff) : 0.0;
  std::vector<std::complex<double>> out;
  out.reserve(delta_pd.size());
  for (const double dpd : delta_pd) {
    const std::complex<double> sigma_b = g2_eff * chi(op.omega_b_tilde, op.params.kappa_b, dpd);
    const std::complex<double> inv_m =
        kI * (op.delta_m_tilde - dpd) + 0.5 * op.params.kappa_m + sigma_b;
    const std::complex<double> inv_cav =
        kI * (op.delta_a - dpd) + 0.5 * op.params.kappa_a + g2_ma / inv_m;
    out.push_back(1.0 - op.params.kappa_2 / inv_cav);
  }
  return out;
}

}  // namespace

std::vector<std::complex<double>> reflection_spectrum(const OperatingPoint& op,
                                                      const std::vector<double>& delta_pd) {
  return reflection_impl(op, delta_pd, true);
}

std::vector<std::complex<double>> reflection_background(const OperatingPoint& op,
                                                        const std::vector<double>& delta_pd) {
  return reflection_impl(op, delta_pd, false);
}

}  // namespace kerrcmm
