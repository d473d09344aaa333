#pragma once

#include <string>

#include "kerrcmm/params.hpp"
#include "kerrcmm/sweep.hpp"

namespace kerrcmm {

// Probe-spectrum window, linear Hz on the delta_pd = omega_p - omega_d axis.
struct ProbeWindow {
  double start_hz = 0.0;
  double stop_hz = 0.0;
  int points = 0;
  double zoom_span_hz = 0.0;  // optional extra CSV spanning +- this around the
                              // dressed mechanical frequency (0 = off)
  int zoom_points = 0;
  BranchLabel branch = BranchLabel::upper;  // which root the probe sees
};

struct ModelToggles {
  Backaction backaction = Backaction::off;
  EvalMode response_mode = EvalMode::one_shot;
  double kappa_b_scale = 1.0;  // applied by the verify command only: scales the
                               // mechanical linewidth so the ODE oracle settles
                               // at desk timescales
};

// Parsed, validated run description. Frequencies are already converted to
// angular units; the sweep plan and probe window keep their I/O units (dBm,
// Hz offsets converted at use).
struct RunConfig {
  SystemParams params;
  DriveCondition drive;
  bool has_sweep = false;
  SweepPlan sweep;
  bool has_probe = false;
  ProbeWindow probe;
  ModelToggles model;
  std::string output_dir = "out";
};

// Strict sectioned key=value parser: unknown sections, unknown keys, missing
// keys, duplicate keys, and malformed numbers all throw ConfigError with a
// "section.key" path in the message. Number parsing is locale-independent.
RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig parse_config(const std::string& path);

// Canonical re-emission of a config (12 significant digits, linear units).
// When provenance is non-empty it is placed as a comment directly above the
// nu_m_bare_hz line. Output is byte-deterministic for equal inputs.
std::string serialize_config(const RunConfig& cfg, const std::string& provenance = "");

}  // namespace kerrcmm
