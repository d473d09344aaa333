#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "kerrcmm/params.hpp"

namespace kerrcmm {

// Coefficients of the occupation cubic in x = |M|^2. After the cavity is
// eliminated adiabatically the steady magnon occupation solves
//
//   4 k_m^2 x^3 + 4 k_m delta0 x^2 + (delta0^2 + gamma0^2) x - drive_strength = 0
//
// with
//   eta_a          = 1 / (delta_a^2 + (kappa_a/2)^2)
//   delta0         = delta_m - eta_a g_ma^2 delta_a      (effective detuning)
//   gamma0         = kappa_m/2 + eta_a g_ma^2 kappa_a/2  (effective half-linewidth)
//   drive_strength = eta_a kappa_1 g_ma^2 eps_d^2.
struct CubicProblem {
  double delta0 = 0.0;          // rad/s
  double gamma0 = 0.0;          // rad/s, > 0
  double eta_a = 0.0;           // s^2, > 0
  double k_m = 0.0;             // rad/s per excitation
  double drive_strength = 0.0;  // s^-3 scale (D), >= 0
};

enum class BranchLabel { lower, middle, upper };

const char* to_string(BranchLabel label);

struct SteadyBranch {
  double occupation = 0.0;  // x = |M|^2
  std::complex<double> m_amp{0.0, 0.0};
  std::complex<double> a_amp{0.0, 0.0};
  std::complex<double> b_amp{0.0, 0.0};
  bool stable = false;
  bool marginal = false;  // tangent (double) root at a bistable-window endpoint
  BranchLabel label = BranchLabel::lower;
};

// Whether the steady-state equations feed the phonon displacement back into
// the magnon detuning. Off by default: the displacement and cross-Kerr terms
// are ~1e-3 of the self-Kerr dressing at the reference operating points, and
// the cubic above drops them. `on` runs a damped self-consistent refinement.
enum class Backaction { off, on };

CubicProblem build_cubic(const SystemParams& p, const DriveCondition& d);

// Same, with the drive amplitude supplied directly (lets callers express
// eps_d = 0 exactly and reuse a precomputed amplitude in sweeps).
CubicProblem build_cubic_with_amplitude(const SystemParams& p, const Detunings& det,
                                        double eps_d);

// Drive strength that places x on the response curve: D(x) = x((delta0+2 k_m x)^2 + gamma0^2).
double drive_strength_at(const CubicProblem& c, double x);

// d D/d x, the slope of the drive-strength curve; its sign decides stability.
double cubic_slope(const CubicProblem& c, double x);

// |cubic(x)| / (sum of term magnitudes); every root we return keeps this
// below 1e-10.
double cubic_residual(const CubicProblem& c, double x);

// All real roots x >= 0, sorted ascending; amplitudes and stability unfilled.
// Root count is 1, 2 (degenerate tangency, the double root collapsed into one
// entry with marginal = true), or 3. k_m = 0 returns the single linear root
// drive_strength / (delta0^2 + gamma0^2).
std::vector<SteadyBranch> solve_occupation(const CubicProblem& c);

// Fills stable/marginal/label. A root is stable iff cubic_slope > 0 (the
// branch where occupation falls with rising drive is unstable); a sorted
// triple is always [stable, unstable, stable]. Tangent roots
// (|slope| <= 1e-8 of its term scale) are flagged marginal and not stable.
std::vector<SteadyBranch> classify_stability(const CubicProblem& c,
                                             std::vector<SteadyBranch> roots);

// Drive-strength interval with three positive roots. Nonempty iff
// k_m * delta0 < 0 and delta0^2 >= 3 gamma0^2 (equality collapses the window
// to a point). Endpoints are the extrema of D(x) at
// x_pm = (-2 delta0 -+ sqrt(delta0^2 - 3 gamma0^2)) / (6 k_m).
// Requires k_m != 0.
struct BistableWindow {
  double d_low = 0.0;       // D at the lower window edge (backward jump)
  double d_high = 0.0;      // D at the upper window edge (forward jump)
  double x_at_d_low = 0.0;  // larger extremum occupation (upper-branch terminus)
  double x_at_d_high = 0.0; // smaller extremum occupation (lower-branch terminus)
};
std::optional<BistableWindow> bistable_window(const CubicProblem& c);

// Complex steady amplitudes at a root x of the matching cubic:
//   M = -i g_ma sqrt(kappa_1) eps_d / [(i delta_a + kappa_a/2)(i dm~ + kappa_m/2) + g_ma^2]
//   A = (sqrt(kappa_1) eps_d - i g_ma M) / (i delta_a + kappa_a/2)
//   B = -i g_mb x / (i wb~ + kappa_b/2),  wb~ = omega_b + k_cross x
// where dm~ = delta_m + 2 k_m x (plus the displacement and cross-Kerr terms
// when back-action is on). |M|^2 = x is an algebraic identity at a true root;
// a relative mismatch beyond 1e-8 throws NumericalError.
SteadyBranch steady_amplitudes(const SystemParams& p, const DriveCondition& d,
                               double occupation, Backaction ba = Backaction::off);

// The three contributions to the magnon frequency pull at a filled branch:
// 2 k_m |M|^2 (self-Kerr, dominant), k_cross |B|^2, and 2 g_mb Re[B]
// (static displacement).
struct MagnonShift {
  double self_kerr = 0.0;
  double cross_kerr = 0.0;
  double phonon_displacement = 0.0;
  double total() const { return self_kerr + cross_kerr + phonon_displacement; }
};
MagnonShift magnon_frequency_shift(const SystemParams& p, const SteadyBranch& branch);

// Convenience: build + solve + classify + fill amplitudes in one call. With
// back-action on, each root is refined self-consistently (the cubic is
// rebuilt with the phonon terms folded into delta_m until the root settles).
std::vector<SteadyBranch> solve_branches(const SystemParams& p, const DriveCondition& d,
                                         Backaction ba = Backaction::off);

// Which root to calibrate against when the observed point sits inside a
// bistable window. `automatic` requires a unique root and throws otherwise.
enum class BranchHint { automatic, lower, upper };

// Finds omega_m_bare such that bare + magnon_frequency_shift = observed
// dressed frequency, via damped fixed-point iteration (the shift depends on
// |M|^2, which depends on delta_m). Converges to |residual| < 2*pi*1 Hz or
// throws NumericalError; throws on in-window ambiguity without a hint.
// p.omega_m_bare is ignored on input.
double calibrate_bare_frequency(const SystemParams& p, const DriveCondition& d,
                                double observed_omega_m,
                                BranchHint hint = BranchHint::automatic,
                                Backaction ba = Backaction::off);

}  // namespace kerrcmm
