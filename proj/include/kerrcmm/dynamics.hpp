#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "kerrcmm/params.hpp"
#include "kerrcmm/steady_state.hpp"

namespace kerrcmm {

// Mean-field amplitudes. A and M live in the drive rotating frame; B stays in
// the lab frame (the drive frame shifts only the cavity and magnon).
struct ModeState {
  std::complex<double> a{0.0, 0.0};
  std::complex<double> m{0.0, 0.0};
  std::complex<double> b{0.0, 0.0};
  double t = 0.0;  // seconds
};

// Mean-field equations of motion (time derivative packed into a ModeState
// with t = 1). Term-by-term mapping to the Hamiltonian pieces is documented
// at the implementation.
ModeState derivatives(const SystemParams& p, const DriveCondition& d, const ModeState& s);

struct IntegrateOptions {
  double rel_tol = 1e-9;        // per-step relative accuracy target
  double abs_floor = 1.0;       // amplitude below which components count as zero
  double initial_step = 0.0;    // 0 = choose from the fastest rate in params
  double max_step = 0.0;        // 0 = horizon / 16; either way capped by the
                                // stability limit of the fastest mode
  std::size_t max_steps = 200'000'000;
  // Steady-state detector: relative derivative rate times one mechanical
  // period stays below this over a full trailing period. 0 disables the
  // detector (integrate to the horizon).
  double steady_rel = 1e-6;
  // Keep every Nth accepted step in the returned trajectory (0 = none).
  int decimate = 0;
  // Divergence detector: |M|^2 beyond 1000x this occupation scale aborts.
  // 0 disables.
  double divergence_occupation = 0.0;
};

enum class IntegrationStatus {
  reached_horizon,  // ran to t = horizon without meeting the steady detector
  steady,           // steady detector satisfied before the horizon
  diverged,         // divergence detector tripped or non-finite state
  step_underflow,   // step size collapsed below machine resolution
  step_limit,       // max_steps exhausted
};

struct Trajectory {
  std::vector<ModeState> samples;  // decimated accepted steps (if requested)
  ModeState final_state;
  IntegrationStatus status = IntegrationStatus::reached_horizon;
  std::size_t steps_accepted = 0;
  bool steady() const { return status == IntegrationStatus::steady; }
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) over the three complex
// amplitudes.
Trajectory integrate(const SystemParams& p, const DriveCondition& d, ModeState initial,
                     double horizon, const IntegrateOptions& opt = {});

enum class BranchVerdict { stable, unstable, inconclusive };

const char* to_string(BranchVerdict v);

struct VerifyOptions {
  std::uint64_t seed = 0x6d61676e6f6e73ULL;  // fixed default: determinism by default
  double rel_perturbation = 1e-3;  // kick size, relative, random phase
  double return_tol = 1e-4;        // "returned" when within this of the branch
  double escape_rel = 0.5;         // "escaped" when occupation moved this much
  double horizon = 0.0;            // 0 = auto from the slowest decay rate
  double rel_tol = 1e-9;
};

// Time-domain check of a steady branch: kick the amplitudes by
// rel_perturbation with seeded random phases and integrate.
//   stable       - state returns within return_tol of the branch and stays
//                  there for a full mechanical period
//   unstable     - occupation leaves the branch by escape_rel (or diverges)
//   inconclusive - horizon expired before either happened
BranchVerdict verify_branch(const SystemParams& p, const DriveCondition& d,
                            const SteadyBranch& branch, const VerifyOptions& opt = {});

}  // namespace kerrcmm
