#include "kerrcmm/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <utility>

#include "kerrcmm/units.hpp"

namespace kerrcmm {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

using Y = std::array<std::complex<double>, 3>;  // (A, M, B)

Y add_scaled(const Y& y, double h, const Y& k) {
  return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]};
}

// Right-hand side. Each line names the interaction term it derives from:
//   - detuning/damping: free evolution of each mode in its frame,
//   - beam-splitter: g_ma (a m+ + a+ m) exchanging cavity and magnon quanta,
//   - dispersive displacement: g_mb m+m (b + b+), which both drives the
//     phonon with |M|^2 and shifts the magnon by the displacement 2 Re B,
//   - self-Kerr: k_m m+m m+m acting on the magnon twice per quantum,
//   - cross-Kerr: k_cross m+m b+b shifting each mode by the other's occupation,
//   - drive: sqrt(kappa_1) eps_d entering through port 1.
Y rhs(const SystemParams& p, const Detunings& det, double root_k1_eps, const Y& y) {
  const auto& [A, M, B] = y;
  const double m2 = std::norm(M);
  const double b2 = std::norm(B);
  const double two_re_b = 2.0 * B.real();

  const std::complex<double> dA =
      -(kI * det.delta_a + 0.5 * p.kappa_a) * A  // detuning/damping
      - kI * p.g_ma * M                          // beam-splitter
      + root_k1_eps;                             // drive
  const std::complex<double> dM =
      -(kI * det.delta_m + 0.5 * p.kappa_m) * M  // detuning/damping
      - kI * p.g_ma * A                          // beam-splitter
      - kI * p.g_mb * two_re_b * M               // dispersive displacement back-action
      - 2.0 * kI * p.k_m * m2 * M                // self-Kerr
      - kI * p.k_cross * b2 * M;                 // cross-Kerr (phonon occupation)
  const std::complex<double> dB =
      -(kI * p.omega_b + 0.5 * p.kappa_b) * B    // lab-frame oscillation/damping
      - kI * p.g_mb * m2                         // dispersive displacement drive
      - kI * p.k_cross * m2 * B;                 // cross-Kerr (magnon occupation)
  return {dA, dM, dB};
}

bool finite(const Y& y) {
  for (const auto& c : y) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                 A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;

double fastest_rate(const SystemParams& p, const Detunings& det, const Y& y0) {
  double r = std::abs(det.delta_a) + p.kappa_a;
  r = std::max(r, std::abs(det.delta_m) + p.kappa_m);
  r = std::max(r, p.omega_b + p.kappa_b);
  r = std::max(r, p.g_ma);
  r = std::max(r, 2.0 * std::abs(p.k_m) * std::norm(y0[1]));
  r = std::max(r, std::abs(p.k_cross) * std::norm(y0[1]));
  return std::max(r, 1.0);
}

// Shared stepping loop. The observer sees every accepted state and may stop
// the run; it returns 0 to continue, otherwise a small code the caller maps
// to its own result.
template <typename Observer>
Trajectory integrate_loop(const SystemParams& p, const DriveCondition& d, ModeState initial,
                          double horizon, const IntegrateOptions& opt, Observer&& observer,
                          int* observer_code) {
  const Detunings det = detunings(p, d);
  const double root_k1_eps = std::sqrt(p.kappa_1) * drive_amplitude(d);
  const double t_end = initial.t + horizon;
  const double period_b = units::two_pi / p.omega_b;

  Y y{initial.a, initial.m, initial.b};
  double t = initial.t;

  const double rate = fastest_rate(p, det, y);
  double h = opt.initial_step > 0.0 ? opt.initial_step : 1e-2 / rate;
  // An explicit scheme is only conditionally stable on oscillatory modes.
  // Near a fixed point the local error of the flat solution vanishes, so
  // accuracy control alone would let h grow until the fastest latent mode
  // (usually the lab-frame phonon) amplifies from rounding noise; cap the
  // step well inside the stability region instead.
  const double h_stab = 0.5 / rate;
  const double h_max =
      std::min(opt.max_step > 0.0 ? opt.max_step : horizon / 16.0, h_stab);
  h = std::min(h, h_max);

  Trajectory tr;
  tr.status = IntegrationStatus::reached_horizon;

  // Trailing window of relative derivative rates for the steady detector.
  std::deque<std::pair<double, double>> window;

  Y k1 = rhs(p, det, root_k1_eps, y);
  std::size_t accepted = 0;

  while (t < t_end) {
    if (tr.steps_accepted + 1 > opt.max_steps) {
      tr.status = IntegrationStatus::step_limit;
      break;
    }
    h = std::min(h, t_end - t);
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1e-12)) {
      tr.status = IntegrationStatus::step_underflow;
      break;
    }

    const Y k2 = rhs(p, det, root_k1_eps, add_scaled(y, h * A21, k1));
    const Y k3 = rhs(p, det, root_k1_eps,
                     {y[0] + h * (A31 * k1[0] + A32 * k2[0]),
                      y[1] + h * (A31 * k1[1] + A32 * k2[1]),
                      y[2] + h * (A31 * k1[2] + A32 * k2[2])});
    const Y k4 = rhs(p, det, root_k1_eps,
                     {y[0] + h * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
                      y[1] + h * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1]),
                      y[2] + h * (A41 * k1[2] + A42 * k2[2] + A43 * k3[2])});
    const Y k5 = rhs(p, det, root_k1_eps,
                     {y[0] + h * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
                      y[1] + h * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1]),
                      y[2] + h * (A51 * k1[2] + A52 * k2[2] + A53 * k3[2] + A54 * k4[2])});
    const Y k6 =
        rhs(p, det, root_k1_eps,
            {y[0] + h * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0]),
             y[1] + h * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1]),
             y[2] + h * (A61 * k1[2] + A62 * k2[2] + A63 * k3[2] + A64 * k4[2] + A65 * k5[2])});
    Y ynew;
    for (int i = 0; i < 3; ++i) {
      ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    const Y k7 = rhs(p, det, root_k1_eps, ynew);

    if (!finite(ynew)) {
      tr.status = IntegrationStatus::diverged;
      break;
    }

    double err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const std::complex<double> e =
          h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
      const double sc =
          opt.rel_tol * (std::max(std::abs(y[i]), std::abs(ynew[i])) + opt.abs_floor);
      err += std::norm(e) / (sc * sc);
    }
    err = std::sqrt(err / 3.0);

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // first-same-as-last
      ++tr.steps_accepted;
      ++accepted;

      if (opt.divergence_occupation > 0.0 &&
          std::norm(y[1]) > 1e3 * opt.divergence_occupation) {
        tr.status = IntegrationStatus::diverged;
        break;
      }

      ModeState s{y[0], y[1], y[2], t};
      if (opt.decimate > 0 && accepted % static_cast<std::size_t>(opt.decimate) == 0) {
        tr.samples.push_back(s);
      }

      if (opt.steady_rel > 0.0) {
        double rel_rate = 0.0;
        for (int i = 0; i < 3; ++i) {
          rel_rate = std::max(rel_rate, std::abs(k1[i]) / (std::abs(y[i]) + opt.abs_floor));
        }
        window.emplace_back(t, rel_rate);
        // Keep exactly one sample at or beyond the period boundary so the
        // window always brackets a full trailing period (sample times are
        // nearly equally spaced, so requiring a sample inside a thin band at
        // the boundary would almost never be satisfiable).
        while (window.size() >= 2 && window[1].first <= t - period_b) window.pop_front();
        if (window.front().first <= t - period_b) {
          double worst = 0.0;
          for (const auto& [wt, wr] : window) worst = std::max(worst, wr);
          if (worst * period_b < opt.steady_rel) {
            tr.status = IntegrationStatus::steady;
            tr.final_state = s;
            if (observer_code) *observer_code = 0;
            return tr;
          }
        }
      }

      if (observer_code) {
        const int code = observer(s);
        if (code != 0) {
          *observer_code = code;
          tr.final_state = s;
          return tr;
        }
      }
    }

    const double factor =
        err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h = std::min(h * factor, h_max);
  }

  tr.final_state = ModeState{y[0], y[1], y[2], t};
  if (observer_code) *observer_code = 0;
  return tr;
}

}  // namespace

const char* to_string(BranchVerdict v) {
  switch (v) {
    case BranchVerdict::stable: return "stable";
    case BranchVerdict::unstable: return "unstable";
    case BranchVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

ModeState derivatives(const SystemParams& p, const DriveCondition& d, const ModeState& s) {
  const Detunings det = detunings(p, d);
  const double root_k1_eps = std::sqrt(p.kappa_1) * drive_amplitude(d);
  const Y dy = rhs(p, det, root_k1_eps, {s.a, s.m, s.b});
  return ModeState{dy[0], dy[1], dy[2], 1.0};
}

Trajectory integrate(const SystemParams& p, const DriveCondition& d, ModeState initial,
                     double horizon, const IntegrateOptions& opt) {
  auto no_observer = [](const ModeState&) { return 0; };
  return integrate_loop(p, d, initial, horizon, opt, no_observer, nullptr);
}

BranchVerdict verify_branch(const SystemParams& p, const DriveCondition& d,
                            const SteadyBranch& branch, const VerifyOptions& opt) {
  const double x = branch.occupation;
  const Y y0{branch.a_amp, branch.m_amp, branch.b_amp};

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> phase(0.0, units::two_pi);
  ModeState init;
  init.a = y0[0] + opt.rel_perturbation * (std::abs(y0[0]) + 1.0) *
                       std::exp(kI * phase(rng));
  init.m = y0[1] + opt.rel_perturbation * (std::abs(y0[1]) + 1.0) *
                       std::exp(kI * phase(rng));
  init.b = y0[2] + opt.rel_perturbation * (std::abs(y0[2]) + 1.0) *
                       std::exp(kI * phase(rng));

  const double slowest = 0.5 * std::min({p.kappa_a, p.kappa_m, p.kappa_b});
  const double horizon = opt.horizon > 0.0 ? opt.horizon : 60.0 / slowest;
  const double period_b = units::two_pi / p.omega_b;

  IntegrateOptions iopt;
  iopt.rel_tol = opt.rel_tol;
  iopt.steady_rel = 0.0;  // the observer below decides, not the steady detector
  iopt.divergence_occupation = std::max(x, 1.0);

  double returned_since = -1.0;
  auto observer = [&](const ModeState& s) -> int {
    const double occ = std::norm(s.m);
    if (std::abs(occ - x) > opt.escape_rel * std::max(x, 1.0)) {
      return 2;  // escaped the branch
    }
    double dist = 0.0;
    const Y y{s.a, s.m, s.b};
    for (int i = 0; i < 3; ++i) {
      dist = std::max(dist, std::abs(y[i] - y0[i]) / (std::abs(y0[i]) + 1.0));
    }
    if (dist < opt.return_tol) {
      if (returned_since < 0.0) returned_since = s.t;
      if (s.t - returned_since >= period_b) return 1;  // returned and stayed
    } else {
      returned_since = -1.0;
    }
    return 0;
  };

  int code = 0;
  const Trajectory tr = integrate_loop(p, d, init, horizon, iopt, observer, &code);
  if (code == 1) return BranchVerdict::stable;
  if (code == 2) return BranchVerdict::unstable;
  if (tr.status == IntegrationStatus::diverged) return BranchVerdict::unstable;
  return BranchVerdict::inconclusive;
}

}  // namespace kerrcmm
