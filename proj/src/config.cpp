#include "kerrcmm/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "kerrcmm/errors.hpp"
#include "kerrcmm/units.hpp"

namespace kerrcmm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Raw parse pass: sections of key -> value strings, duplicates rejected.
struct RawConfig {
  std::string origin;
  std::map<std::string, std::map<std::string, std::string>> sections;
};

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& message) {
  throw ConfigError(origin + ": " + path + ": " + message);
}

RawConfig parse_raw(const std::string& text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments: full-line and trailing (value text never contains '#').
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        fail(origin, "line " + std::to_string(lineno), "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      raw.sections[section];  // a section may be present but empty
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(origin, "line " + std::to_string(lineno), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      fail(origin, key, "key appears before any [section]");
    }
    if (key.empty() || value.empty()) {
      fail(origin, section + "." + key, "empty key or value");
    }
    if (!raw.sections[section].emplace(key, value).second) {
      fail(origin, section + "." + key, "duplicate key");
    }
  }
  return raw;
}

// Typed access layer that tracks which keys were consumed so strict
// unknown-key rejection can run at the end.
class Reader {
 public:
  Reader(const RawConfig& raw) : raw_(raw) {}

  bool has_section(const std::string& s) const { return raw_.sections.count(s) != 0; }

  bool has_key(const std::string& s, const std::string& k) const {
    const auto it = raw_.sections.find(s);
    return it != raw_.sections.end() && it->second.count(k) != 0;
  }

  std::string get_string(const std::string& s, const std::string& k) {
    const auto it = raw_.sections.find(s);
    if (it == raw_.sections.end() || it->second.count(k) == 0) {
      fail(raw_.origin, s + "." + k, "missing required key");
    }
    consumed_.insert(s + "." + k);
    return it->second.at(k);
  }

  double get_double(const std::string& s, const std::string& k) {
    const std::string v = get_string(s, k);
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
      fail(raw_.origin, s + "." + k, "not a number: \"" + v + "\"");
    }
    return out;
  }

  double get_double_or(const std::string& s, const std::string& k, double fallback) {
    return has_key(s, k) ? get_double(s, k) : fallback;
  }

  int get_int(const std::string& s, const std::string& k) {
    const double v = get_double(s, k);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      fail(raw_.origin, s + "." + k, "not an integer");
    }
    return i;
  }

  bool get_bool(const std::string& s, const std::string& k) {
    const std::string v = get_string(s, k);
    if (v == "on" || v == "true") return true;
    if (v == "off" || v == "false") return false;
    fail(raw_.origin, s + "." + k, "expected on/off (or true/false), got \"" + v + "\"");
  }

  // After all reads: every present key must have been consumed, and only
  // known sections may appear.
  void finish(const std::set<std::string>& known_sections) {
    for (const auto& [sec, kv] : raw_.sections) {
      if (known_sections.count(sec) == 0) {
        fail(raw_.origin, sec, "unknown section");
      }
      for (const auto& [key, value] : kv) {
        if (consumed_.count(sec + "." + key) == 0) {
          fail(raw_.origin, sec + "." + key, "unknown key (check the unit suffix)");
        }
      }
    }
  }

  const std::string& origin() const { return raw_.origin; }

 private:
  RawConfig raw_;
  std::set<std::string> consumed_;
};

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  Reader r(parse_raw(text, origin));
  RunConfig cfg;

  using units::hz_to_rad;
  cfg.params.omega_a = hz_to_rad(r.get_double("modes", "nu_a_hz"));
  cfg.params.kappa_a = hz_to_rad(r.get_double("modes", "kappa_a_hz"));
  cfg.params.kappa_1 = hz_to_rad(r.get_double("modes", "kappa_1_hz"));
  cfg.params.kappa_2 = hz_to_rad(r.get_double("modes", "kappa_2_hz"));
  cfg.params.omega_m_bare = hz_to_rad(r.get_double("modes", "nu_m_bare_hz"));
  cfg.params.kappa_m = hz_to_rad(r.get_double("modes", "kappa_m_hz"));
  cfg.params.omega_b = hz_to_rad(r.get_double("modes", "nu_b_hz"));
  cfg.params.kappa_b = hz_to_rad(r.get_double("modes", "kappa_b_hz"));

  cfg.params.g_ma = hz_to_rad(r.get_double("couplings", "g_ma_hz"));
  cfg.params.g_mb = hz_to_rad(r.get_double("couplings", "g_mb_hz"));
  cfg.params.k_m = hz_to_rad(r.get_double("couplings", "k_m_hz"));
  cfg.params.k_cross = hz_to_rad(r.get_double("couplings", "k_cross_hz"));

  cfg.drive.omega_d = hz_to_rad(r.get_double("drive", "nu_d_hz"));
  cfg.drive.power_dbm = r.get_double("drive", "power_dbm");
  cfg.drive.attenuation_db = r.get_double_or("drive", "attenuation_db", 0.0);

  if (r.has_section("sweep")) {
    cfg.has_sweep = true;
    const std::string axis = r.get_string("sweep", "axis");
    if (axis == "power_dbm") {
      cfg.sweep.axis = SweepAxis::power_dbm;
      cfg.sweep.start = r.get_double("sweep", "start_dbm");
      cfg.sweep.stop = r.get_double("sweep", "stop_dbm");
    } else if (axis == "drive_detuning") {
      cfg.sweep.axis = SweepAxis::drive_detuning;
      cfg.sweep.start = hz_to_rad(r.get_double("sweep", "start_hz"));
      cfg.sweep.stop = hz_to_rad(r.get_double("sweep", "stop_hz"));
    } else {
      fail(r.origin(), "sweep.axis", "expected power_dbm or drive_detuning");
    }
    cfg.sweep.points = r.get_int("sweep", "points");
    if (cfg.sweep.points < 2) fail(r.origin(), "sweep.points", "need at least 2 points");
    if (cfg.sweep.start == cfg.sweep.stop) {
      fail(r.origin(), "sweep", "start and stop must differ");
    }
    const std::string dir = r.has_key("sweep", "direction")
                                ? r.get_string("sweep", "direction")
                                : std::string("loop");
    if (dir == "forward") cfg.sweep.direction = SweepDirection::forward;
    else if (dir == "backward") cfg.sweep.direction = SweepDirection::backward;
    else if (dir == "loop") cfg.sweep.direction = SweepDirection::loop;
    else fail(r.origin(), "sweep.direction", "expected forward, backward, or loop");
    const std::string pol = r.has_key("sweep", "policy")
                                ? r.get_string("sweep", "policy")
                                : std::string("continuation");
    if (pol == "continuation") cfg.sweep.policy = BranchPolicy::continuation;
    else if (pol == "lowest") cfg.sweep.policy = BranchPolicy::lowest;
    else if (pol == "highest") cfg.sweep.policy = BranchPolicy::highest;
    else fail(r.origin(), "sweep.policy", "expected continuation, lowest, or highest");
  }

  if (r.has_section("probe")) {
    cfg.has_probe = true;
    cfg.probe.start_hz = r.get_double("probe", "start_hz");
    cfg.probe.stop_hz = r.get_double("probe", "stop_hz");
    cfg.probe.points = r.get_int("probe", "points");
    if (cfg.probe.points < 2) fail(r.origin(), "probe.points", "need at least 2 points");
    cfg.probe.zoom_span_hz = r.get_double_or("probe", "zoom_span_hz", 0.0);
    cfg.probe.zoom_points = r.has_key("probe", "zoom_points")
                                ? r.get_int("probe", "zoom_points")
                                : 0;
    if (cfg.probe.zoom_span_hz > 0.0 && cfg.probe.zoom_points < 2) {
      fail(r.origin(), "probe.zoom_points", "zoom_span_hz needs zoom_points >= 2");
    }
    if (r.has_key("probe", "branch")) {
      const std::string b = r.get_string("probe", "branch");
      if (b == "lower") cfg.probe.branch = BranchLabel::lower;
      else if (b == "middle") cfg.probe.branch = BranchLabel::middle;
      else if (b == "upper") cfg.probe.branch = BranchLabel::upper;
      else fail(r.origin(), "probe.branch", "expected lower, middle, or upper");
    }
  }

  if (r.has_section("model")) {
    if (r.has_key("model", "backaction")) {
      cfg.model.backaction =
          r.get_bool("model", "backaction") ? Backaction::on : Backaction::off;
    }
    if (r.has_key("model", "self_consistent_response")) {
      cfg.model.response_mode = r.get_bool("model", "self_consistent_response")
                                    ? EvalMode::self_consistent
                                    : EvalMode::one_shot;
    }
    cfg.model.kappa_b_scale = r.get_double_or("model", "kappa_b_scale", 1.0);
    if (!(cfg.model.kappa_b_scale >= 1.0)) {
      fail(r.origin(), "model.kappa_b_scale", "must be >= 1");
    }
  }

  if (r.has_section("output") && r.has_key("output", "dir")) {
    cfg.output_dir = r.get_string("output", "dir");
  }

  r.finish({"modes", "couplings", "drive", "sweep", "probe", "model", "output"});

  try {
    validate(cfg.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!(cfg.drive.omega_d > 0.0)) {
    fail(origin, "drive.nu_d_hz", "must be positive");
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string serialize_config(const RunConfig& cfg, const std::string& provenance) {
  using units::rad_to_hz;
  std::ostringstream out;
  out << "[modes]\n";
  out << "nu_a_hz = " << fmt(rad_to_hz(cfg.params.omega_a)) << "\n";
  out << "kappa_a_hz = " << fmt(rad_to_hz(cfg.params.kappa_a)) << "\n";
  out << "kappa_1_hz = " << fmt(rad_to_hz(cfg.params.kappa_1)) << "\n";
  out << "kappa_2_hz = " << fmt(rad_to_hz(cfg.params.kappa_2)) << "\n";
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "nu_m_bare_hz = " << fmt(rad_to_hz(cfg.params.omega_m_bare)) << "\n";
  out << "kappa_m_hz = " << fmt(rad_to_hz(cfg.params.kappa_m)) << "\n";
  out << "nu_b_hz = " << fmt(rad_to_hz(cfg.params.omega_b)) << "\n";
  out << "kappa_b_hz = " << fmt(rad_to_hz(cfg.params.kappa_b)) << "\n";
  out << "\n[couplings]\n";
  out << "g_ma_hz = " << fmt(rad_to_hz(cfg.params.g_ma)) << "\n";
  out << "g_mb_hz = " << fmt(rad_to_hz(cfg.params.g_mb)) << "\n";
  out << "k_m_hz = " << fmt(rad_to_hz(cfg.params.k_m)) << "\n";
  out << "k_cross_hz = " << fmt(rad_to_hz(cfg.params.k_cross)) << "\n";
  out << "\n[drive]\n";
  out << "nu_d_hz = " << fmt(rad_to_hz(cfg.drive.omega_d)) << "\n";
  out << "power_dbm = " << fmt(cfg.drive.power_dbm) << "\n";
  out << "attenuation_db = " << fmt(cfg.drive.attenuation_db) << "\n";
  if (cfg.has_sweep) {
    out << "\n[sweep]\n";
    if (cfg.sweep.axis == SweepAxis::power_dbm) {
      out << "axis = power_dbm\n";
      out << "start_dbm = " << fmt(cfg.sweep.start) << "\n";
      out << "stop_dbm = " << fmt(cfg.sweep.stop) << "\n";
    } else {
      out << "axis = drive_detuning\n";
      out << "start_hz = " << fmt(rad_to_hz(cfg.sweep.start)) << "\n";
      out << "stop_hz = " << fmt(rad_to_hz(cfg.sweep.stop)) << "\n";
    }
    out << "points = " << cfg.sweep.points << "\n";
    out << "direction = "
        << (cfg.sweep.direction == SweepDirection::forward
                ? "forward"
                : cfg.sweep.direction == SweepDirection::backward ? "backward" : "loop")
        << "\n";
    out << "policy = "
        << (cfg.sweep.policy == BranchPolicy::continuation
                ? "continuation"
                : cfg.sweep.policy == BranchPolicy::lowest ? "lowest" : "highest")
        << "\n";
  }
  if (cfg.has_probe) {
    out << "\n[probe]\n";
    out << "start_hz = " << fmt(cfg.probe.start_hz) << "\n";
    out << "stop_hz = " << fmt(cfg.probe.stop_hz) << "\n";
    out << "points = " << cfg.probe.points << "\n";
    if (cfg.probe.zoom_span_hz > 0.0) {
      out << "zoom_span_hz = " << fmt(cfg.probe.zoom_span_hz) << "\n";
      out << "zoom_points = " << cfg.probe.zoom_points << "\n";
    }
    out << "branch = " << to_string(cfg.probe.branch) << "\n";
  }
  out << "\n[model]\n";
  out << "backaction = " << (cfg.model.backaction == Backaction::on ? "on" : "off") << "\n";
  out << "self_consistent_response = "
      << (cfg.model.response_mode == EvalMode::self_consistent ? "on" : "off") << "\n";
  out << "kappa_b_scale = " << fmt(cfg.model.kappa_b_scale) << "\n";
  out << "\n[output]\n";
  out << "dir = " << cfg.output_dir << "\n";
  return out.str();
}

}  // namespace kerrcmm
