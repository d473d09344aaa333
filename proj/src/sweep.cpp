#include "kerrcmm/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kerrcmm/errors.hpp"
#include "kerrcmm/units.hpp"

namespace kerrcmm {

namespace {

std::vector<double> make_grid(double start, double stop, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    g[i] = start + (stop - start) * static_cast<double>(i) / (points - 1);
  }
  g.back() = stop;  // land exactly on the endpoint
  return g;
}

DriveCondition drive_at(const DriveCondition& base, SweepAxis axis, double value) {
  DriveCondition d = base;
  if (axis == SweepAxis::power_dbm) {
    d.power_dbm = value;
  } else {
    d.omega_d = base.omega_d + value;
  }
  return d;
}

const SteadyBranch* nearest_stable_log(const std::vector<SteadyBranch>& roots, double x_prev) {
  const SteadyBranch* best = nullptr;
  double best_dist = 0.0;
  for (const auto& b : roots) {
    if (!b.stable) continue;
    const double dist = std::abs(std::log((b.occupation + 1e-300) / (x_prev + 1e-300)));
    if (best == nullptr || dist < best_dist) {
      best = &b;
      best_dist = dist;
    }
  }
  return best;
}

const SteadyBranch* extreme_stable(const std::vector<SteadyBranch>& roots, bool lowest) {
  if (lowest) {
    for (const auto& b : roots) {
      if (b.stable) return &b;
    }
  } else {
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
      if (it->stable) return &*it;
    }
  }
  return nullptr;
}

// One directional pass over an explicit grid. seed, when present, is the
// occupation occupied at the point just before the grid begins (used to chain
// the backward pass onto the forward endpoint).
std::vector<SweepRecord> sweep_pass(const SystemParams& p, const DriveCondition& base,
                                    const SweepPlan& plan, const std::vector<double>& grid,
                                    std::optional<double> seed) {
  std::vector<SweepRecord> records;
  records.reserve(grid.size());
  std::optional<double> x_prev = seed;

  for (const double value : grid) {
    const DriveCondition d = drive_at(base, plan.axis, value);
    const Detunings det = detunings(p, d);
    const double eps = drive_amplitude(d);
    const CubicProblem cubic = build_cubic_with_amplitude(p, det, eps);
    const auto roots = classify_stability(cubic, solve_occupation(cubic));

    const SteadyBranch* pick = nullptr;
    switch (plan.policy) {
      case BranchPolicy::lowest:
        pick = extreme_stable(roots, true);
        break;
      case BranchPolicy::highest:
        pick = extreme_stable(roots, false);
        break;
      case BranchPolicy::continuation:
        if (x_prev.has_value()) {
          pick = nearest_stable_log(roots, *x_prev);
        } else {
          // First point with no history: take the lowest stable root (the
          // branch continuously connected to zero drive).
          pick = extreme_stable(roots, true);
        }
        break;
    }
    if (pick == nullptr) {
      // Cannot happen for this cubic: there is always at least one stable root.
      throw NumericalError("run_sweep: no stable root at a sweep point");
    }

    const SteadyBranch filled = steady_amplitudes(p, d, pick->occupation);
    const OperatingPoint op = make_operating_point(p, d, filled);
    const ResponseResult resp = evaluate_response(op);

    SweepRecord rec;
    rec.axis_value = value;
    rec.power_dbm = d.power_dbm;
    rec.power_w = units::dbm_to_watts(d.power_dbm);
    rec.occupation = pick->occupation;
    rec.omega_m_dressed = p.omega_m_bare + 2.0 * p.k_m * pick->occupation;
    rec.g_eff_mag = std::abs(op.g_eff);
    rec.spring_shift = resp.spring_shift;
    rec.cross_kerr_shift = resp.cross_kerr_shift;
    rec.total_shift = resp.total_shift;
    rec.linewidth_change = resp.linewidth_change;
    rec.stable = pick->stable;
    rec.jump = x_prev.has_value() && *x_prev > 0.0 &&
               std::abs(pick->occupation - *x_prev) > 0.5 * *x_prev;
    records.push_back(rec);
    x_prev = pick->occupation;
  }
  return records;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SystemParams& p, const DriveCondition& base,
                                   const SweepPlan& plan) {
  if (plan.points < 2) throw std::invalid_argument("run_sweep: plan needs at least 2 points");
  if (plan.start == plan.stop) throw std::invalid_argument("run_sweep: start equals stop");

  const std::vector<double> grid = make_grid(plan.start, plan.stop, plan.points);

  if (plan.direction == SweepDirection::forward) {
    return sweep_pass(p, base, plan, grid, std::nullopt);
  }
  if (plan.direction == SweepDirection::backward) {
    std::vector<double> rev(grid.rbegin(), grid.rend());
    return sweep_pass(p, base, plan, rev, std::nullopt);
  }
  // loop: forward pass, then backward chained onto the forward endpoint.
  std::vector<SweepRecord> fwd = sweep_pass(p, base, plan, grid, std::nullopt);
  std::vector<double> rev(grid.rbegin(), grid.rend());
  const std::vector<SweepRecord> bwd =
      sweep_pass(p, base, plan, rev, fwd.back().occupation);
  fwd.insert(fwd.end(), bwd.begin(), bwd.end());
  return fwd;
}

HysteresisResult hysteresis_loop(const SystemParams& p, const DriveCondition& base,
                                 SweepAxis axis, double start, double stop, int points) {
  SweepPlan plan;
  plan.axis = axis;
  plan.start = start;
  plan.stop = stop;
  plan.points = points;
  plan.policy = BranchPolicy::continuation;

  const std::vector<double> grid = make_grid(start, stop, points);
  HysteresisResult result;
  result.forward = sweep_pass(p, base, plan, grid, std::nullopt);
  std::vector<double> rev(grid.rbegin(), grid.rend());
  result.backward = sweep_pass(p, base, plan, rev, result.forward.back().occupation);

  // Backward runs on the exact reversed grid, so records align index-to-index.
  double area = 0.0;
  const int n = points;
  for (int i = 0; i + 1 < n; ++i) {
    const double f0 = std::abs(result.forward[i].occupation -
                               result.backward[n - 1 - i].occupation);
    const double f1 = std::abs(result.forward[i + 1].occupation -
                               result.backward[n - 2 - i].occupation);
    area += 0.5 * (f0 + f1) * std::abs(grid[i + 1] - grid[i]);
  }
  result.loop_area = area;
  return result;
}

}  // namespace kerrcmm
