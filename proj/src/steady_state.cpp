#include "kerrcmm/steady_state.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "kerrcmm/errors.hpp"
#include "kerrcmm/units.hpp"

namespace kerrcmm {

namespace {

constexpr double kDegenerateRel = 1e-8;   // roots closer than this collapse
constexpr double kResidualRel = 1e-10;    // post-polish residual contract
constexpr double kFoldRel = 1e-13;        // |f| at a critical point below this
                                          // (of the term scale) is a tangency
constexpr std::complex<double> kI{0.0, 1.0};

// Evaluate the cubic and its derivative in the original variable x.
double cubic_value(const CubicProblem& c, double x) {
  const double c3 = 4.0 * c.k_m * c.k_m;
  const double c2 = 4.0 * c.k_m * c.delta0;
  const double c1 = c.delta0 * c.delta0 + c.gamma0 * c.gamma0;
  return ((c3 * x + c2) * x + c1) * x - c.drive_strength;
}

double cubic_term_scale(const CubicProblem& c, double x) {
  const double ax = std::abs(x);
  const double c3 = 4.0 * c.k_m * c.k_m;
  const double c2 = std::abs(4.0 * c.k_m * c.delta0);
  const double c1 = c.delta0 * c.delta0 + c.gamma0 * c.gamma0;
  return ((c3 * ax + c2) * ax + c1) * ax + c.drive_strength;
}

// Extended-precision twins of the above. The coefficients span up to ~36
// decades across the supported parameter ranges, so the root polish runs in
// long double to keep the forward error of a Horner evaluation far below the
// residual contract even for the worst-conditioned draws.
long double cubic_value_ld(const CubicProblem& c, long double x) {
  const long double k = c.k_m;
  const long double c3 = 4.0L * k * k;
  const long double c2 = 4.0L * k * static_cast<long double>(c.delta0);
  const long double c1 = static_cast<long double>(c.delta0) * c.delta0 +
                         static_cast<long double>(c.gamma0) * c.gamma0;
  return ((c3 * x + c2) * x + c1) * x - static_cast<long double>(c.drive_strength);
}

long double cubic_slope_ld(const CubicProblem& c, long double x) {
  const long double k = c.k_m;
  const long double c1 = static_cast<long double>(c.delta0) * c.delta0 +
                         static_cast<long double>(c.gamma0) * c.gamma0;
  return (12.0L * k * k * x + 8.0L * k * static_cast<long double>(c.delta0)) * x + c1;
}

long double cubic_term_scale_ld(const CubicProblem& c, long double x) {
  const long double ax = x < 0.0L ? -x : x;
  const long double k = c.k_m;
  const long double c3 = 4.0L * k * k;
  const long double c2 = std::abs(4.0L * k * static_cast<long double>(c.delta0));
  const long double c1 = static_cast<long double>(c.delta0) * c.delta0 +
                         static_cast<long double>(c.gamma0) * c.gamma0;
  return ((c3 * ax + c2) * ax + c1) * ax + static_cast<long double>(c.drive_strength);
}

SteadyBranch root_only(double x, bool marginal = false) {
  SteadyBranch b;
  b.occupation = x;
  b.marginal = marginal;
  return b;
}

// Newton iteration seeded inside a bracket [lo, hi] with a strict sign change
// (flo is the sign of f at lo). Every iterate splits the bracket, so the
// method degrades to bisection instead of escaping when Newton misbehaves
// near a tangency, and converges quadratically once close.
double refine_root(const CubicProblem& c, long double lo, long double hi,
                   long double flo, double seed) {
  const bool lo_negative = flo < 0.0L;
  long double x = seed;
  if (!(x > lo && x < hi)) x = 0.5L * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const long double f = cubic_value_ld(c, x);
    if (f == 0.0L) return static_cast<double>(x);
    if ((f < 0.0L) == lo_negative) lo = x; else hi = x;
    if (hi - lo <= 1e-18L * std::max(std::abs(lo), std::abs(hi))) break;
    const long double fp = cubic_slope_ld(c, x);
    long double xn = fp == 0.0L ? 0.5L * (lo + hi) : x - f / fp;
    if (!(xn > lo && xn < hi)) xn = 0.5L * (lo + hi);
    x = xn;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

// Real parts of the eigenvalues of the companion matrix, formed after scaling
// x by s = max(|b2|, sqrt(|b1|), cbrt(|b0|)) so every root of the scaled
// cubic has magnitude <= 2 and the matrix is uniformly well conditioned.
// These are cheap, usually excellent Newton seeds; near a tangency the
// complex pair's real part still lands next to the double root. Accuracy and
// root counting never depend on them, the brackets own both.
int companion_seeds(const CubicProblem& c, double lin, double (&seeds)[3]) {
  const double c3 = 4.0 * c.k_m * c.k_m;
  const double b2 = 4.0 * c.k_m * c.delta0 / c3;
  const double b1 = lin / c3;
  const double b0 = -c.drive_strength / c3;
  const double s = std::max({std::abs(b2), std::sqrt(std::abs(b1)),
                             std::cbrt(std::abs(b0))});
  if (!(s > 0.0) || !std::isfinite(s)) return 0;
  const double a2 = b2 / s;
  const double a1 = b1 / (s * s);
  const double a0 = b0 / (s * s * s);
  if (!std::isfinite(a2) || !std::isfinite(a1) || !std::isfinite(a0)) return 0;

  Eigen::Matrix3d companion;
  companion << 0.0, 0.0, -a0,
               1.0, 0.0, -a1,
               0.0, 1.0, -a2;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, /*computeEigenvectors=*/false);
  const auto eig = solver.eigenvalues();
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const double x = eig[i].real() * s;
    if (std::isfinite(x)) seeds[n++] = x;
  }
  return n;
}

double seed_in(const double (&seeds)[3], int n_seeds, long double lo, long double hi) {
  for (int i = 0; i < n_seeds; ++i) {
    if (seeds[i] > lo && seeds[i] < hi) return seeds[i];
  }
  return static_cast<double>(0.5L * (lo + hi));
}

}  // namespace

const char* to_string(BranchLabel label) {
  switch (label) {
    case BranchLabel::lower: return "lower";
    case BranchLabel::middle: return "middle";
    case BranchLabel::upper: return "upper";
  }
  return "?";
}

CubicProblem build_cubic_with_amplitude(const SystemParams& p, const Detunings& det,
                                        double eps_d) {
  const double half_ka = 0.5 * p.kappa_a;
  const double denom = det.delta_a * det.delta_a + half_ka * half_ka;
  if (!(denom > 0.0)) {
    throw std::invalid_argument(
        "build_cubic: degenerate configuration (delta_a and kappa_a both zero)");
  }
  CubicProblem c;
  c.eta_a = 1.0 / denom;
  const double g2 = p.g_ma * p.g_ma;
  c.delta0 = det.delta_m - c.eta_a * g2 * det.delta_a;
  c.gamma0 = 0.5 * p.kappa_m + c.eta_a * g2 * half_ka;
  c.k_m = p.k_m;
  c.drive_strength = c.eta_a * p.kappa_1 * g2 * eps_d * eps_d;
  return c;
}

CubicProblem build_cubic(const SystemParams& p, const DriveCondition& d) {
  return build_cubic_with_amplitude(p, detunings(p, d), drive_amplitude(d));
}

double drive_strength_at(const CubicProblem& c, double x) {
  const double u = c.delta0 + 2.0 * c.k_m * x;
  return x * (u * u + c.gamma0 * c.gamma0);
}

double cubic_slope(const CubicProblem& c, double x) {
  return (12.0 * c.k_m * c.k_m * x + 8.0 * c.k_m * c.delta0) * x +
         (c.delta0 * c.delta0 + c.gamma0 * c.gamma0);
}

double cubic_residual(const CubicProblem& c, double x) {
  const double scale = cubic_term_scale(c, x);
  if (scale == 0.0) return std::abs(cubic_value(c, x));
  return std::abs(cubic_value(c, x)) / scale;
}

std::vector<SteadyBranch> solve_occupation(const CubicProblem& c) {
  if (!(c.gamma0 > 0.0) || !(c.eta_a > 0.0) || !(c.drive_strength >= 0.0) ||
      !std::isfinite(c.delta0)) {
    throw std::invalid_argument("solve_occupation: malformed CubicProblem");
  }

  const double lin = c.delta0 * c.delta0 + c.gamma0 * c.gamma0;

  if (c.drive_strength == 0.0) {
    return {root_only(0.0)};
  }
  if (c.k_m == 0.0) {
    return {root_only(c.drive_strength / lin)};
  }

  // Structure before values: f(x) = 4k^2 x^3 + 4k delta0 x^2 + lin x - D is
  // an upward cubic with f(0) = -D < 0, so a positive root always exists.
  // The critical points x_s < x_l of f (real and positive exactly when
  // k_m delta0 < 0 and delta0^2 > 3 gamma0^2) cut [0, inf) into monotone
  // segments, and the sign of f at each critical point fixes the root count
  // before any iteration starts: one sign change per segment, one root per
  // sign change. Companion-matrix eigenvalues seed the per-segment Newton
  // polish; counting never relies on them, so QR noise cannot drop a root.
  double seeds[3];
  const int n_seeds = companion_seeds(c, lin, seeds);

  const double disc = c.delta0 * c.delta0 - 3.0 * c.gamma0 * c.gamma0;
  const bool have_crit = c.k_m * c.delta0 < 0.0 && disc > 0.0;

  std::vector<SteadyBranch> out;
  if (!have_crit) {
    // f is nondecreasing on [0, inf): a single simple root. f(D/lin) >= 0
    // whenever k_m delta0 >= 0 (every omitted term is then positive), so the
    // growth loop only runs when the Kerr term pulls the root higher.
    long double hi = static_cast<long double>(c.drive_strength) / lin;
    for (int grow = 0; grow < 600 && cubic_value_ld(c, hi) < 0.0L; ++grow) {
      hi *= 4.0L;
    }
    out.push_back(root_only(refine_root(c, 0.0L, hi, -1.0L,
                                        seed_in(seeds, n_seeds, 0.0L, hi))));
  } else {
    // Critical points, ordered. sqrt(disc) < |delta0|, so neither subtraction
    // below cancels catastrophically.
    const long double s = std::sqrt(static_cast<long double>(disc));
    const long double d0 = c.delta0;
    const long double k6 = 6.0L * static_cast<long double>(c.k_m);
    const long double xa = (-2.0L * d0 - s) / k6;
    const long double xb = (-2.0L * d0 + s) / k6;
    const long double x_s = std::min(xa, xb);
    const long double x_l = std::max(xa, xb);

    const long double fs = cubic_value_ld(c, x_s);  // local max of f
    const long double fl = cubic_value_ld(c, x_l);  // local min of f
    const bool fold_s = std::abs(fs) <= kFoldRel * cubic_term_scale_ld(c, x_s);
    const bool fold_l = std::abs(fl) <= kFoldRel * cubic_term_scale_ld(c, x_l);

    // f(hi) >= 0 by term dominance: x >= |delta0|/|k_m| makes the cubic term
    // outweigh the quadratic one and x >= D/lin handles the rest. x_l is
    // always below |delta0|/(2|k_m|), so the upper bracket is never empty.
    const long double hi =
        std::max(static_cast<long double>(std::abs(c.delta0) / std::abs(c.k_m)),
                 static_cast<long double>(c.drive_strength) / lin);

    if (fold_s && fold_l) {
      // The two tangencies coincide within tolerance: a triple root.
      out.push_back(root_only(static_cast<double>(0.5L * (x_s + x_l)), true));
    } else if (fold_s) {
      // Tangency at the local max plus a simple root beyond the local min.
      out.push_back(root_only(static_cast<double>(x_s), true));
      out.push_back(root_only(refine_root(c, x_l, hi, fl,
                                          seed_in(seeds, n_seeds, x_l, hi))));
    } else if (fold_l) {
      // Simple root before the local max plus a tangency at the local min.
      out.push_back(root_only(refine_root(c, 0.0L, x_s, -1.0L,
                                          seed_in(seeds, n_seeds, 0.0L, x_s))));
      out.push_back(root_only(static_cast<double>(x_l), true));
    } else if (fs > 0.0L && fl < 0.0L) {
      out.push_back(root_only(refine_root(c, 0.0L, x_s, -1.0L,
                                          seed_in(seeds, n_seeds, 0.0L, x_s))));
      out.push_back(root_only(refine_root(c, x_s, x_l, fs,
                                          seed_in(seeds, n_seeds, x_s, x_l))));
      out.push_back(root_only(refine_root(c, x_l, hi, fl,
                                          seed_in(seeds, n_seeds, x_l, hi))));
    } else if (fs < 0.0L) {
      // f stays negative through both critical points: one root beyond x_l.
      out.push_back(root_only(refine_root(c, x_l, hi, fl,
                                          seed_in(seeds, n_seeds, x_l, hi))));
    } else {
      // The local min never dips below zero: one root before x_s.
      out.push_back(root_only(refine_root(c, 0.0L, x_s, -1.0L,
                                          seed_in(seeds, n_seeds, 0.0L, x_s))));
    }
  }

  // Collapse near-coincident roots (relative 1e-8): a tangency is reported
  // once and flagged marginal rather than silently dropped or duplicated.
  std::sort(out.begin(), out.end(), [](const SteadyBranch& a, const SteadyBranch& b) {
    return a.occupation < b.occupation;
  });
  std::vector<SteadyBranch> merged;
  for (std::size_t i = 0; i < out.size();) {
    std::size_t j = i + 1;
    bool marginal = out[i].marginal;
    while (j < out.size() &&
           out[j].occupation - out[i].occupation <=
               kDegenerateRel * std::max(out[j].occupation, 1.0)) {
      marginal = true;
      ++j;
    }
    merged.push_back(root_only(out[i + (j - i) / 2].occupation,
                               marginal || (j - i) > 1));
    i = j;
  }

  for (const auto& b : merged) {
    if (cubic_residual(c, b.occupation) > kResidualRel) {
      throw NumericalError("solve_occupation: root residual above 1e-10 of term scale");
    }
  }
  return merged;
}

std::vector<SteadyBranch> classify_stability(const CubicProblem& c,
                                             std::vector<SteadyBranch> roots) {
  for (auto& b : roots) {
    const double x = b.occupation;
    const double slope = cubic_slope(c, x);
    const double scale = std::abs(12.0 * c.k_m * c.k_m * x * x) +
                         std::abs(8.0 * c.k_m * c.delta0 * x) +
                         (c.delta0 * c.delta0 + c.gamma0 * c.gamma0);
    if (std::abs(slope) <= 1e-8 * scale) {
      b.marginal = true;
      b.stable = false;
    } else {
      b.stable = slope > 0.0;
    }
  }

  if (roots.size() == 3) {
    roots[0].label = BranchLabel::lower;
    roots[1].label = BranchLabel::middle;
    roots[2].label = BranchLabel::upper;
  } else if (roots.size() == 2) {
    roots[0].label = BranchLabel::lower;
    roots[1].label = BranchLabel::upper;
  } else if (roots.size() == 1) {
    // A single root is "upper" when the drive sits above a bistable window
    // (continuation of the high branch), otherwise "lower".
    roots[0].label = BranchLabel::lower;
    if (c.k_m != 0.0) {
      if (const auto win = bistable_window(c);
          win && c.drive_strength >= win->d_high) {
        roots[0].label = BranchLabel::upper;
      }
    }
  }
  return roots;
}

std::optional<BistableWindow> bistable_window(const CubicProblem& c) {
  if (c.k_m == 0.0) {
    throw std::invalid_argument("bistable_window: k_m must be nonzero");
  }
  if (!(c.k_m * c.delta0 < 0.0)) return std::nullopt;
  const double disc = c.delta0 * c.delta0 - 3.0 * c.gamma0 * c.gamma0;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  // Extrema of D(x); with k_m*delta0 < 0 both are positive.
  const double x_minus = (-2.0 * c.delta0 - s) / (6.0 * c.k_m);
  const double x_plus = (-2.0 * c.delta0 + s) / (6.0 * c.k_m);
  const double x_small = std::min(x_minus, x_plus);
  const double x_large = std::max(x_minus, x_plus);
  BistableWindow w;
  w.x_at_d_high = x_small;
  w.x_at_d_low = x_large;
  w.d_high = drive_strength_at(c, x_small);  // local max of D(x): forward fold
  w.d_low = drive_strength_at(c, x_large);   // local min of D(x): backward fold
  return w;
}

namespace {

std::complex<double> phonon_displacement(const SystemParams& p, double x) {
  const double wb_t = p.omega_b + p.k_cross * x;
  return -kI * p.g_mb * x / (kI * wb_t + 0.5 * p.kappa_b);
}

// delta_m with the phonon terms folded in (back-action on) or not (off).
double delta_m_effective(const SystemParams& p, double delta_m_bare, double x,
                         Backaction ba) {
  if (ba == Backaction::off) return delta_m_bare;
  const std::complex<double> B = phonon_displacement(p, x);
  return delta_m_bare + 2.0 * p.g_mb * B.real() + p.k_cross * std::norm(B);
}

}  // namespace

SteadyBranch steady_amplitudes(const SystemParams& p, const DriveCondition& d,
                               double occupation, Backaction ba) {
  const Detunings det = detunings(p, d);
  const double eps = drive_amplitude(d);
  const double x = occupation;

  const std::complex<double> B = phonon_displacement(p, x);
  const double dm_eff = delta_m_effective(p, det.delta_m, x, ba);
  const double dm_tilde = dm_eff + 2.0 * p.k_m * x;

  const std::complex<double> ca = kI * det.delta_a + 0.5 * p.kappa_a;
  const std::complex<double> cm = kI * dm_tilde + 0.5 * p.kappa_m;
  const std::complex<double> den = ca * cm + p.g_ma * p.g_ma;
  const double root_k1_eps = std::sqrt(p.kappa_1) * eps;

  const std::complex<double> M = -kI * p.g_ma * root_k1_eps / den;
  const std::complex<double> A = (root_k1_eps - kI * p.g_ma * M) / ca;

  // |M|^2 = x is exactly the occupation cubic rewritten; failure means the
  // caller passed something that is not a root of the matching cubic.
  const double m2 = std::norm(M);
  const double mismatch = std::abs(m2 - x);
  if (mismatch > 1e-8 * std::max(x, 1e-300)) {
    throw NumericalError("steady_amplitudes: |M|^2 does not reproduce the occupation");
  }

  SteadyBranch b;
  b.occupation = x;
  b.m_amp = M;
  b.a_amp = A;
  b.b_amp = B;
  return b;
}

MagnonShift magnon_frequency_shift(const SystemParams& p, const SteadyBranch& branch) {
  MagnonShift s;
  s.self_kerr = 2.0 * p.k_m * branch.occupation;
  s.cross_kerr = p.k_cross * std::norm(branch.b_amp);
  s.phonon_displacement = 2.0 * p.g_mb * branch.b_amp.real();
  return s;
}

std::vector<SteadyBranch> solve_branches(const SystemParams& p, const DriveCondition& d,
                                         Backaction ba) {
  const Detunings det = detunings(p, d);
  const double eps = drive_amplitude(d);
  CubicProblem c = build_cubic_with_amplitude(p, det, eps);
  std::vector<SteadyBranch> roots = classify_stability(c, solve_occupation(c));

  if (ba == Backaction::on) {
    // Per-root damped refinement: fold the phonon terms of this root into
    // delta_m, re-solve, follow the nearest root. The correction is ~1e-3 of
    // the self-Kerr dressing, so the loop contracts fast. Assumes the branch
    // persists under the refinement (true away from window endpoints).
    for (auto& b : roots) {
      double x = b.occupation;
      for (int iter = 0; iter < 100; ++iter) {
        Detunings det_eff = det;
        det_eff.delta_m = delta_m_effective(p, det.delta_m, x, Backaction::on);
        const CubicProblem ce = build_cubic_with_amplitude(p, det_eff, eps);
        const auto refined = solve_occupation(ce);
        double best = refined.front().occupation;
        double best_dist = std::abs(std::log((best + 1e-300) / (x + 1e-300)));
        for (const auto& r : refined) {
          const double dist = std::abs(std::log((r.occupation + 1e-300) / (x + 1e-300)));
          if (dist < best_dist) {
            best = r.occupation;
            best_dist = dist;
          }
        }
        const double next = 0.5 * (x + best);
        if (std::abs(next - x) <= 1e-14 * std::max(x, 1.0)) {
          x = best;
          break;
        }
        x = next;
      }
      b.occupation = x;
    }
  }

  for (auto& b : roots) {
    const SteadyBranch amp = steady_amplitudes(p, d, b.occupation, ba);
    b.m_amp = amp.m_amp;
    b.a_amp = amp.a_amp;
    b.b_amp = amp.b_amp;
  }
  return roots;
}

double calibrate_bare_frequency(const SystemParams& p, const DriveCondition& d,
                                double observed_omega_m, BranchHint hint,
                                Backaction ba) {
  SystemParams work = p;
  double bare = observed_omega_m;
  const double tol = units::hz_to_rad(1e-3);  // well under the 2*pi*1 Hz contract

  for (int iter = 0; iter < 500; ++iter) {
    work.omega_m_bare = bare;
    const auto branches = solve_branches(work, d, ba);

    const SteadyBranch* pick = nullptr;
    if (branches.size() == 1) {
      pick = &branches.front();
    } else {
      switch (hint) {
        case BranchHint::automatic:
          throw NumericalError(
              "calibrate_bare_frequency: drive point is inside a bistable window; "
              "pass a branch hint (lower or upper)");
        case BranchHint::lower:
          for (const auto& b : branches) {
            if (b.stable) { pick = &b; break; }
          }
          break;
        case BranchHint::upper:
          for (auto it = branches.rbegin(); it != branches.rend(); ++it) {
            if (it->stable) { pick = &*it; break; }
          }
          break;
      }
    }
    if (pick == nullptr) {
      throw NumericalError("calibrate_bare_frequency: no stable branch to calibrate against");
    }

    const MagnonShift shift = magnon_frequency_shift(work, *pick);
    const double target = observed_omega_m - shift.total();
    if (std::abs(target - bare) < tol) {
      return target;
    }
    bare += 0.5 * (target - bare);  // damped: the shift steepens near the window
  }
  throw NumericalError("calibrate_bare_frequency: fixed-point iteration did not converge");
}

}  // namespace kerrcmm
