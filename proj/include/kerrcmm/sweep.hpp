#pragma once

#include <optional>
#include <vector>

#include "kerrcmm/params.hpp"
#include "kerrcmm/response.hpp"
#include "kerrcmm/steady_state.hpp"

namespace kerrcmm {

// What the sweep varies. power_dbm re-sets the drive power at each point;
// drive_detuning offsets the drive frequency by the axis value (in rad/s here,
// Hz at the I/O boundary) while the power stays fixed.
enum class SweepAxis { power_dbm, drive_detuning };

enum class SweepDirection { forward, backward, loop };

// How the occupied branch is chosen at each point. continuation follows the
// stable root nearest the previously occupied one (nearest in log |M|^2,
// since occupations span decades); lowest/highest always take the extreme
// stable root.
enum class BranchPolicy { continuation, lowest, highest };

struct SweepPlan {
  SweepAxis axis = SweepAxis::power_dbm;
  double start = 0.0;  // dBm for power_dbm, rad/s offset for drive_detuning
  double stop = 0.0;
  int points = 2;      // >= 2; guidance: >= 200 points per 25 dB so
                       // intra-branch steps stay below the jump threshold
  SweepDirection direction = SweepDirection::forward;
  BranchPolicy policy = BranchPolicy::continuation;
};

struct SweepRecord {
  double axis_value = 0.0;        // dBm or rad/s offset, per plan.axis
  double power_dbm = 0.0;         // source power at this point
  double power_w = 0.0;           // the same in watts
  double occupation = 0.0;        // |M|^2 of the occupied branch
  double omega_m_dressed = 0.0;   // omega_m_bare + 2 k_m |M|^2, rad/s
  double g_eff_mag = 0.0;         // |G| = g_mb sqrt(|M|^2), rad/s
  double spring_shift = 0.0;      // rad/s
  double cross_kerr_shift = 0.0;  // rad/s
  double total_shift = 0.0;       // rad/s
  double linewidth_change = 0.0;  // rad/s
  bool stable = true;
  bool jump = false;  // occupation moved by more than 50% relative vs the previous point
};

// Quasi-static sweep: solves the cubic at every point, then selects the
// occupied branch sequentially per the plan's policy. A jump is flagged on
// the first record after the occupied branch ceased to exist (relative
// occupation change > 0.5). direction == loop returns the forward pass
// followed by the backward pass (backward seeded from the forward endpoint).
std::vector<SweepRecord> run_sweep(const SystemParams& p, const DriveCondition& base,
                                   const SweepPlan& plan);

struct HysteresisResult {
  std::vector<SweepRecord> forward;
  std::vector<SweepRecord> backward;  // traversed stop -> start, seeded from forward's end
  double loop_area = 0.0;  // trapezoid integral of |x_fwd - x_bwd| over the axis
};

// Forward then backward over [start, stop] on the same grid; the loop area is
// positive iff the range overlaps a bistable window.
HysteresisResult hysteresis_loop(const SystemParams& p, const DriveCondition& base,
                                 SweepAxis axis, double start, double stop, int points);

}  // namespace kerrcmm
