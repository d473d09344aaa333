#pragma once

#include <cstdint>
#include <string>

#include "kerrcmm/config.hpp"

// Bodies of the CLI subcommands, kept in the library so they are directly
// testable. Each writes its files under the output directory and returns the
// process exit code (0 success, 3 verification mismatch). Config and
// numerical failures are reported by exception; the CLI front end maps them
// to exit codes 1 and 2.
namespace kerrcmm {

struct CommandOptions {
  std::string out_dir;           // empty = use config's [output] dir
  bool svg = false;              // also emit SVG plots
  std::uint64_t seed = 0x6d61676e6f6e73ULL;  // verify's perturbation seed
};

struct CalibrateArgs {
  double observed_nu_m_hz = 0.0;  // dressed magnon frequency seen in the lab
  double at_power_dbm = 0.0;      // source power it was observed at
  BranchHint hint = BranchHint::automatic;
};

// One row per steady-state root at the configured drive.
int cmd_steady(const RunConfig& cfg, const CommandOptions& opt);

// Hysteresis sweep per the [sweep] section; sweep.csv (+ sweep.svg).
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt);

// Probe reflection per the [probe] section; spectrum.csv, spectrum_zoom.csv
// when a zoom window is configured (+ spectrum.svg).
int cmd_spectrum(const RunConfig& cfg, const CommandOptions& opt);

// Fits nu_m_bare_hz to an observed dressed frequency and writes
// calibrated.cfg with a provenance comment.
int cmd_calibrate(const RunConfig& cfg, const CalibrateArgs& args, const CommandOptions& opt);

// Time-domain check of every root at the configured drive (with kappa_b
// scaled per [model] kappa_b_scale); verify.csv plus a stdout table. Returns
// 3 when any ODE verdict disagrees with the slope criterion or is
// inconclusive.
int cmd_verify(const RunConfig& cfg, const CommandOptions& opt);

}  // namespace kerrcmm
