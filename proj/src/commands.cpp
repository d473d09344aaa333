#include "kerrcmm/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <vector>

#include "kerrcmm/csv.hpp"
#include "kerrcmm/dynamics.hpp"
#include "kerrcmm/errors.hpp"
#include "kerrcmm/response.hpp"
#include "kerrcmm/svg.hpp"
#include "kerrcmm/units.hpp"

namespace kerrcmm {

namespace {

namespace fs = std::filesystem;
using csv::format_double;
using units::rad_to_hz;

fs::path output_dir(const RunConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = opt.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::vector<double> linspace(double start, double stop, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    g[i] = start + (stop - start) * static_cast<double>(i) / (points - 1);
  }
  g.back() = stop;
  return g;
}

void append_sweep_rows(csv::Table& table, const std::vector<SweepRecord>& records,
                       const SystemParams& p, const char* direction) {
  for (const auto& r : records) {
    table.add_row({direction,
                   format_double(r.axis_value),
                   format_double(r.power_w),
                   format_double(r.occupation),
                   format_double(rad_to_hz(r.omega_m_dressed - p.omega_m_bare)),
                   format_double(rad_to_hz(r.g_eff_mag)),
                   format_double(rad_to_hz(r.spring_shift)),
                   format_double(rad_to_hz(r.cross_kerr_shift)),
                   format_double(rad_to_hz(r.total_shift)),
                   format_double(rad_to_hz(r.linewidth_change)),
                   flag(r.stable),
                   flag(r.jump)});
  }
}

}  // namespace

int cmd_steady(const RunConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = output_dir(cfg, opt);
  const auto branches = solve_branches(cfg.params, cfg.drive, cfg.model.backaction);

  csv::Table table({"label", "occupation", "stable", "marginal", "nu_m_dressed_hz",
                    "nu_b_dressed_hz", "g_eff_hz", "a_re", "a_im", "m_re", "m_im", "b_re",
                    "b_im"});
  for (const auto& b : branches) {
    const double nu_m = rad_to_hz(cfg.params.omega_m_bare + 2.0 * cfg.params.k_m * b.occupation);
    const double nu_b = rad_to_hz(cfg.params.omega_b + cfg.params.k_cross * b.occupation);
    table.add_row({to_string(b.label),
                   format_double(b.occupation),
                   flag(b.stable),
                   flag(b.marginal),
                   format_double(nu_m),
                   format_double(nu_b),
                   format_double(rad_to_hz(cfg.params.g_mb * std::sqrt(b.occupation))),
                   format_double(b.a_amp.real()), format_double(b.a_amp.imag()),
                   format_double(b.m_amp.real()), format_double(b.m_amp.imag()),
                   format_double(b.b_amp.real()), format_double(b.b_amp.imag())});
  }
  csv::atomic_write(dir / "steady.csv", table.str());
  std::printf("steady: %zu root(s) written to %s\n", table.row_count(),
              (dir / "steady.csv").string().c_str());
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt) {
  if (!cfg.has_sweep) {
    throw ConfigError("sweep: config has no [sweep] section");
  }
  const fs::path dir = output_dir(cfg, opt);

  // The first column carries the swept axis: source power for power sweeps,
  // drive-frequency offset for detuning sweeps.
  const bool power_axis = cfg.sweep.axis == SweepAxis::power_dbm;
  csv::Table table({"direction", power_axis ? "power_dbm" : "detuning_hz", "power_w",
                    "occupation", "delta_nu_m_hz", "g_eff_hz", "spring_shift_hz",
                    "cross_kerr_shift_hz", "total_shift_hz", "linewidth_change_hz", "stable",
                    "jump"});

  std::vector<SweepRecord> fwd, bwd;
  if (cfg.sweep.direction == SweepDirection::loop) {
    const HysteresisResult loop = hysteresis_loop(cfg.params, cfg.drive, cfg.sweep.axis,
                                                  cfg.sweep.start, cfg.sweep.stop,
                                                  cfg.sweep.points);
    fwd = loop.forward;
    bwd = loop.backward;
  } else if (cfg.sweep.direction == SweepDirection::forward) {
    fwd = run_sweep(cfg.params, cfg.drive, cfg.sweep);
  } else {
    bwd = run_sweep(cfg.params, cfg.drive, cfg.sweep);
  }

  auto axis_out = [&](double v) { return power_axis ? v : rad_to_hz(v); };
  for (auto* recs : {&fwd, &bwd}) {
    for (auto& r : *recs) r.axis_value = axis_out(r.axis_value);
  }
  append_sweep_rows(table, fwd, cfg.params, "forward");
  append_sweep_rows(table, bwd, cfg.params, "backward");
  csv::atomic_write(dir / "sweep.csv", table.str());

  if (opt.svg) {
    std::vector<svg::Series> series;
    auto to_series = [&](const std::vector<SweepRecord>& recs, const char* label,
                         const char* color) {
      svg::Series s;
      s.label = label;
      s.color = color;
      for (const auto& r : recs) {
        s.x.push_back(r.axis_value);
        s.y.push_back(rad_to_hz(r.total_shift));
      }
      series.push_back(std::move(s));
    };
    if (!fwd.empty()) to_series(fwd, "forward", "#1f77b4");
    if (!bwd.empty()) to_series(bwd, "backward", "#d62728");
    const std::string xlabel =
        power_axis ? "drive power (dBm)" : "drive detuning offset (Hz)";
    csv::atomic_write(dir / "sweep.svg",
                      svg::line_plot("mechanical frequency shift", xlabel,
                                     "total shift (Hz)", series));
  }

  std::printf("sweep: %zu record(s) written to %s\n", fwd.size() + bwd.size(),
              (dir / "sweep.csv").string().c_str());
  return 0;
}

namespace {

const SteadyBranch* find_branch(const std::vector<SteadyBranch>& branches, BranchLabel label) {
  for (const auto& b : branches) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

csv::Table spectrum_table(const OperatingPoint& op, const std::vector<double>& grid_hz) {
  std::vector<double> grid_rad(grid_hz.size());
  for (std::size_t i = 0; i < grid_hz.size(); ++i) grid_rad[i] = units::hz_to_rad(grid_hz[i]);
  const auto s = reflection_spectrum(op, grid_rad);
  csv::Table table({"delta_pd_hz", "s_re", "s_im", "s_abs2"});
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    table.add_row({format_double(grid_hz[i]), format_double(s[i].real()),
                   format_double(s[i].imag()), format_double(std::norm(s[i]))});
  }
  return table;
}

}  // namespace

int cmd_spectrum(const RunConfig& cfg, const CommandOptions& opt) {
  if (!cfg.has_probe) {
    throw ConfigError("spectrum: config has no [probe] section");
  }
  const fs::path dir = output_dir(cfg, opt);

  const auto branches = solve_branches(cfg.params, cfg.drive, cfg.model.backaction);
  const SteadyBranch* branch = find_branch(branches, cfg.probe.branch);
  if (branch == nullptr) {
    throw ConfigError(std::string("probe.branch: branch \"") + to_string(cfg.probe.branch) +
                      "\" does not exist at the configured drive (" +
                      std::to_string(branches.size()) + " root(s) found)");
  }
  const OperatingPoint op = make_operating_point(cfg.params, cfg.drive, *branch);

  const auto grid = linspace(cfg.probe.start_hz, cfg.probe.stop_hz, cfg.probe.points);
  const csv::Table table = spectrum_table(op, grid);
  csv::atomic_write(dir / "spectrum.csv", table.str());

  if (cfg.probe.zoom_span_hz > 0.0) {
    const double center_hz = rad_to_hz(op.omega_b_tilde);
    const auto zoom = linspace(center_hz - cfg.probe.zoom_span_hz,
                               center_hz + cfg.probe.zoom_span_hz, cfg.probe.zoom_points);
    csv::atomic_write(dir / "spectrum_zoom.csv", spectrum_table(op, zoom).str());
  }

  if (opt.svg) {
    std::vector<double> grid_rad(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) grid_rad[i] = units::hz_to_rad(grid[i]);
    const auto s = reflection_spectrum(op, grid_rad);
    svg::Series series;
    series.label = "|S|^2";
    series.color = "#1f77b4";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      series.x.push_back(grid[i]);
      series.y.push_back(std::norm(s[i]));
    }
    csv::atomic_write(dir / "spectrum.svg",
                      svg::line_plot("probe reflection", "probe detuning from drive (Hz)",
                                     "|S|^2", {series}));
  }

  std::printf("spectrum: %d point(s) written to %s\n", cfg.probe.points,
              (dir / "spectrum.csv").string().c_str());
  return 0;
}

int cmd_calibrate(const RunConfig& cfg, const CalibrateArgs& args, const CommandOptions& opt) {
  const fs::path dir = output_dir(cfg, opt);

  DriveCondition at = cfg.drive;
  at.power_dbm = args.at_power_dbm;
  const double observed = units::hz_to_rad(args.observed_nu_m_hz);
  const double bare =
      calibrate_bare_frequency(cfg.params, at, observed, args.hint, cfg.model.backaction);

  RunConfig updated = cfg;
  updated.params.omega_m_bare = bare;
  const std::string provenance = "calibrated: dressed magnon frequency " +
                                 format_double(args.observed_nu_m_hz) + " Hz at " +
                                 format_double(args.at_power_dbm) + " dBm source power";
  csv::atomic_write(dir / "calibrated.cfg", serialize_config(updated, provenance));

  std::printf("calibrate: nu_m_bare_hz = %s written to %s\n",
              format_double(rad_to_hz(bare)).c_str(),
              (dir / "calibrated.cfg").string().c_str());
  return 0;
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& opt) {
  const fs::path dir = output_dir(cfg, opt);

  // The mechanical decay sets the settling time; scale it up so the oracle
  // runs at desk timescales. The cubic (and so every root and slope) does not
  // involve kappa_b, so the verdicts transfer to the unscaled system.
  SystemParams scaled = cfg.params;
  scaled.kappa_b *= cfg.model.kappa_b_scale;

  // The integrated equations carry the phonon feedback terms, so the branches
  // must be refined with back-action on: only then are they exact fixed
  // points to kick around. The slope verdicts are unaffected by this.
  const auto branches = solve_branches(scaled, cfg.drive, Backaction::on);

  csv::Table table({"label", "occupation", "slope_stable", "ode_verdict", "agree"});
  bool all_agree = true;
  std::printf("%-8s %-14s %-12s %-14s %s\n", "label", "occupation", "slope", "ode", "agree");
  for (const auto& b : branches) {
    VerifyOptions vopt;
    vopt.seed = opt.seed;
    const BranchVerdict verdict = verify_branch(scaled, cfg.drive, b, vopt);
    const bool agree = (b.stable && verdict == BranchVerdict::stable) ||
                       (!b.stable && verdict == BranchVerdict::unstable);
    all_agree = all_agree && agree;
    table.add_row({to_string(b.label), format_double(b.occupation), flag(b.stable),
                   to_string(verdict), flag(agree)});
    std::printf("%-8s %-14.6e %-12s %-14s %s\n", to_string(b.label), b.occupation,
                b.stable ? "stable" : "unstable", to_string(verdict), agree ? "yes" : "NO");
  }
  csv::atomic_write(dir / "verify.csv", table.str());
  return all_agree ? 0 : 3;
}

}  // namespace kerrcmm
