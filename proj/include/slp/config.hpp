#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slp/error.hpp"
#include "slp/grid.hpp"
#include "slp/medium.hpp"
#include "slp/modes.hpp"

namespace slp {

/// Scenario configuration: sectioned key-value text with explicit unit
/// suffixes on every dimensioned value (lengths, times, rates, intensities,
/// densities, velocities). Optional keys are resolved to concrete values at
/// load time, so a parsed config serializes canonically and round-trips.
struct ScenarioConfig {
  MediumParams medium;
  ControlDrive drive;

  struct GridSection {
    int nz = 0;
    double dt = 0.0;
    double l_sim = 0.0;
    double pulse_width = 0.0;    // initial two-field pulse, default length/3
    double pulse_center = 0.0;   // default l_sim/2
    double pulse_amplitude = 1.0;
    bool operator==(const GridSection&) const = default;
  } grid;

  struct ProtocolSection {
    double delta_over_gamma = 16.0;
    double l_s = 0.0;          // default medium length
    double l_sprime = 0.0;     // default medium length / 4
    double n_sprime = 1.0;
    double v_g = 0.0;          // drag velocity target, m/s
    double r_mode = 0.0;       // default: guided radius for the drive
    double drag_distance = 0.0; // default 2 sqrt(l_s^2 + l_sprime^2)
    bool spreading = true;
    bool operator==(const ProtocolSection&) const = default;
  } protocol;

  struct OutputSection {
    std::string dir = "out";
    int snapshot_stride = 0;
    bool operator==(const OutputSection&) const = default;
  } output;

  bool operator==(const ScenarioConfig&) const = default;

  Grid make_grid() const { return Grid::make(grid.nz, grid.l_sim, grid.dt); }

  std::string to_text() const;
};

namespace config_detail {

enum class Dim { length, time, rate, intensity, density, velocity };

struct UnitEntry {
  Dim dim;
  double factor;
};

inline const std::map<std::string, UnitEntry>& unit_table() {
  static const std::map<std::string, UnitEntry> table = {
      {"m", {Dim::length, 1.0}},        {"cm", {Dim::length, 1e-2}},
      {"mm", {Dim::length, 1e-3}},      {"um", {Dim::length, 1e-6}},
      {"nm", {Dim::length, 1e-9}},      {"s", {Dim::time, 1.0}},
      {"ms", {Dim::time, 1e-3}},        {"us", {Dim::time, 1e-6}},
      {"ns", {Dim::time, 1e-9}},        {"rad_per_s", {Dim::rate, 1.0}},
      {"rad2_per_s2", {Dim::intensity, 1.0}},
      {"per_m3", {Dim::density, 1.0}},  {"per_cm3", {Dim::density, 1e6}},
      {"m_per_s", {Dim::velocity, 1.0}}};
  return table;
}

inline const char* dim_name(Dim d) {
  switch (d) {
    case Dim::length: return "length";
    case Dim::time: return "time";
    case Dim::rate: return "rate";
    case Dim::intensity: return "intensity";
    case Dim::density: return "density";
    case Dim::velocity: return "velocity";
  }
  return "?";
}

struct RawValue {
  std::string text;
  int line = 0;
  bool used = false;
};

using SectionMap = std::map<std::string, std::map<std::string, RawValue>>;

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_number(const std::string& tok, const std::string& where,
                           int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (...) {
    pos = 0;
  }
  if (pos != tok.size())
    throw ValidationError("line " + std::to_string(line) + ": " + where +
                          ": expected a number, got '" + tok + "'");
  return v;
}

inline double parse_quantity(const std::vector<std::string>& toks,
                             std::size_t i, Dim dim, const std::string& where,
                             int line) {
  if (i + 1 >= toks.size())
    throw ValidationError("line " + std::to_string(line) + ": " + where +
                          ": expected '<number> <unit>' with an explicit " +
                          dim_name(dim) + " unit");
  const double v = parse_number(toks[i], where, line);
  auto it = unit_table().find(toks[i + 1]);
  if (it == unit_table().end() || it->second.dim != dim)
    throw ValidationError("line " + std::to_string(line) + ": " + where +
                          ": '" + toks[i + 1] + "' is not a valid " +
                          dim_name(dim) + " unit");
  return v * it->second.factor;
}

class Extractor {
public:
  Extractor(SectionMap& sections, std::string section)
      : sections_(sections), section_(std::move(section)) {}

  bool has(const std::string& key) const {
    auto s = sections_.find(section_);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  RawValue* find(const std::string& key) {
    auto s = sections_.find(section_);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  std::string where(const std::string& key) const {
    return "[" + section_ + "]." + key;
  }

  double quantity(const std::string& key, Dim dim) {
    RawValue* rv = require(key);
    auto toks = split_ws(rv->text);
    if (toks.size() != 2)
      throw ValidationError("line " + std::to_string(rv->line) + ": " +
                            where(key) +
                            ": expected '<number> <unit>' with an explicit " +
                            dim_name(dim) + " unit");
    return parse_quantity(toks, 0, dim, where(key), rv->line);
  }

  double quantity_or(const std::string& key, Dim dim, double fallback) {
    return has(key) ? quantity(key, dim) : fallback;
  }

  double number(const std::string& key) {
    RawValue* rv = require(key);
    auto toks = split_ws(rv->text);
    if (toks.size() != 1)
      throw ValidationError("line " + std::to_string(rv->line) + ": " +
                            where(key) + ": expected a bare number");
    return parse_number(toks[0], where(key), rv->line);
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v))
      throw ValidationError(where(key) + ": expected an integer");
    return static_cast<int>(v);
  }

  int integer_or(const std::string& key, int fallback) {
    return has(key) ? integer(key) : fallback;
  }

  std::string word(const std::string& key) {
    RawValue* rv = require(key);
    return trim(rv->text);
  }

  std::string word_or(const std::string& key, const std::string& fallback) {
    return has(key) ? word(key) : fallback;
  }

private:
  RawValue* require(const std::string& key) {
    RawValue* rv = find(key);
    if (!rv)
      throw ValidationError(where(key) + ": missing required key");
    return rv;
  }

  SectionMap& sections_;
  std::string section_;
};

inline void format_number(std::ostream& os, double v) {
  std::ostringstream tmp;
  tmp.precision(17);
  tmp << v;
  os << tmp.str();
}

} // namespace config_detail

inline ScenarioConfig parse_config_text(const std::string& text) {
  using namespace config_detail;
  SectionMap sections;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("line " + std::to_string(line_no) +
                              ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      sections[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 'key = value', got '" + line + "'");
    if (section.empty())
      throw ValidationError("line " + std::to_string(line_no) +
                            ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto [it, inserted] = sections[section].emplace(key, RawValue{value, line_no});
    if (!inserted)
      throw ValidationError("line " + std::to_string(line_no) + ": [" +
                            section + "]." + key + ": duplicate key");
  }

  std::string missing;
  for (const char* req : {"medium", "drive", "grid", "protocol"})
    if (!sections.count(req)) missing += missing.empty() ? req : std::string(", ") + req;
  if (!missing.empty())
    throw ValidationError("missing required section(s): " + missing);

  ScenarioConfig cfg;

  {
    Extractor m(sections, "medium");
    cfg.medium.lambda = m.quantity("lambda", Dim::length);
    cfg.medium.gamma = m.quantity("gamma", Dim::rate);
    cfg.medium.density = m.quantity("density", Dim::density);
    cfg.medium.length = m.quantity("length", Dim::length);
    cfg.medium.n_s = m.number("n_s");
    cfg.medium.n_c = m.number("n_c");
    cfg.medium.omega_ratio = m.number_or("omega_ratio", 1.0);
  }

  {
    Extractor dr(sections, "drive");
    const std::string prof = dr.word("profile");
    if (prof == "gaussian")
      cfg.drive.profile = BeamProfile::gaussian;
    else if (prof == "bessel")
      cfg.drive.profile = BeamProfile::bessel;
    else
      throw ValidationError(
          "[drive].profile: expected 'gaussian' or 'bessel', got '" + prof +
          "'");
    cfg.drive.a = dr.quantity("a", Dim::length);
    for (int i = 0;; ++i) {
      const std::string key = "point." + std::to_string(i);
      if (!dr.has(key)) break;
      RawValue* rv = dr.find(key);
      auto toks = split_ws(rv->text);
      if (toks.size() != 6)
        throw ValidationError(
            "line " + std::to_string(rv->line) + ": " + dr.where(key) +
            ": expected '<t> <unit> <om2_plus> <unit> <om2_minus> <unit>'");
      ControlDrive::Breakpoint b;
      b.t = parse_quantity(toks, 0, Dim::time, dr.where(key), rv->line);
      b.om2_plus =
          parse_quantity(toks, 2, Dim::intensity, dr.where(key), rv->line);
      b.om2_minus =
          parse_quantity(toks, 4, Dim::intensity, dr.where(key), rv->line);
      cfg.drive.schedule.push_back(b);
    }
    if (cfg.drive.schedule.empty())
      throw ValidationError("[drive].point.0: missing required key (at least "
                            "one schedule breakpoint)");
  }

  {
    Extractor g(sections, "grid");
    cfg.grid.nz = g.integer("nz");
    cfg.grid.dt = g.quantity("dt", Dim::time);
    cfg.grid.l_sim = g.quantity("l_sim", Dim::length);
    cfg.grid.pulse_width =
        g.quantity_or("pulse_width", Dim::length, cfg.medium.length / 3.0);
    cfg.grid.pulse_center =
        g.quantity_or("pulse_center", Dim::length, 0.5 * cfg.grid.l_sim);
    cfg.grid.pulse_amplitude = g.number_or("pulse_amplitude", 1.0);
    if (cfg.grid.pulse_amplitude < 0.0)
      throw ValidationError("[grid].pulse_amplitude: must be >= 0");
  }

  {
    Extractor p(sections, "protocol");
    cfg.protocol.delta_over_gamma = p.number_or("delta_over_gamma", 16.0);
    cfg.protocol.l_s =
        p.quantity_or("l_s", Dim::length, cfg.medium.length);
    cfg.protocol.l_sprime =
        p.quantity_or("l_sprime", Dim::length, cfg.medium.length / 4.0);
    cfg.protocol.n_sprime = p.number_or("n_sprime", 1.0);
    cfg.protocol.v_g = p.quantity("v_g", Dim::velocity);
    cfg.protocol.r_mode = p.quantity_or("r_mode", Dim::length, 0.0);
    cfg.protocol.drag_distance =
        p.quantity_or("drag_distance", Dim::length, 0.0);
    const std::string spreading = p.word_or("spreading", "on");
    if (spreading == "on")
      cfg.protocol.spreading = true;
    else if (spreading == "off")
      cfg.protocol.spreading = false;
    else
      throw ValidationError("[protocol].spreading: expected 'on' or 'off'");
  }

  if (sections.count("output")) {
    Extractor o(sections, "output");
    cfg.output.dir = o.word_or("dir", "out");
    cfg.output.snapshot_stride = o.integer_or("snapshot_stride", 0);
    if (cfg.output.snapshot_stride < 0)
      throw ValidationError("[output].snapshot_stride: must be >= 0");
  }

  for (const auto& [sec, keys] : sections)
    for (const auto& [key, rv] : keys)
      if (!rv.used)
        throw ValidationError("line " + std::to_string(rv.line) + ": [" + sec +
                              "]." + key + ": unknown key");

  // resolve remaining defaults and check the cross-module invariants
  cfg.medium.validate();
  cfg.drive.validate();
  const DerivedParams derived = derive(cfg.medium);
  if (cfg.protocol.r_mode <= 0.0)
    cfg.protocol.r_mode = guided_radius_exact(cfg.drive.a, derived).radius;
  if (cfg.protocol.drag_distance <= 0.0)
    cfg.protocol.drag_distance =
        2.0 * std::sqrt(cfg.protocol.l_s * cfg.protocol.l_s +
                        cfg.protocol.l_sprime * cfg.protocol.l_sprime);
  cfg.make_grid(); // validates nz, dt <= dz/c
  if (!(cfg.protocol.delta_over_gamma > 0.0))
    throw ValidationError("[protocol].delta_over_gamma: must be > 0");
  if (!(cfg.protocol.l_sprime <= cfg.protocol.l_s &&
        cfg.protocol.l_s <= cfg.medium.length))
    throw ValidationError(
        "[protocol]: expected l_sprime <= l_s <= medium length");
  if (!(cfg.protocol.v_g > 0.0))
    throw ValidationError("[protocol].v_g: must be > 0");
  if (cfg.protocol.n_sprime < 0.0)
    throw ValidationError("[protocol].n_sprime: must be >= 0");
  return cfg;
}

inline std::string ScenarioConfig::to_text() const {
  using config_detail::format_number;
  std::ostringstream os;
  auto q = [&os](const char* key, double v, const char* unit) {
    os << key << " = ";
    format_number(os, v);
    os << ' ' << unit << '\n';
  };
  auto bare = [&os](const char* key, double v) {
    os << key << " = ";
    format_number(os, v);
    os << '\n';
  };
  os << "[medium]\n";
  q("lambda", medium.lambda, "m");
  q("gamma", medium.gamma, "rad_per_s");
  q("density", medium.density, "per_m3");
  q("length", medium.length, "m");
  bare("n_s", medium.n_s);
  bare("n_c", medium.n_c);
  bare("omega_ratio", medium.omega_ratio);
  os << "\n[drive]\n";
  os << "profile = "
     << (drive.profile == BeamProfile::gaussian ? "gaussian" : "bessel")
     << '\n';
  q("a", drive.a, "m");
  for (std::size_t i = 0; i < drive.schedule.size(); ++i) {
    const auto& b = drive.schedule[i];
    os << "point." << i << " = ";
    format_number(os, b.t);
    os << " s ";
    format_number(os, b.om2_plus);
    os << " rad2_per_s2 ";
    format_number(os, b.om2_minus);
    os << " rad2_per_s2\n";
  }
  os << "\n[grid]\n";
  os << "nz = " << grid.nz << '\n';
  q("dt", grid.dt, "s");
  q("l_sim", grid.l_sim, "m");
  q("pulse_width", grid.pulse_width, "m");
  q("pulse_center", grid.pulse_center, "m");
  bare("pulse_amplitude", grid.pulse_amplitude);
  os << "\n[protocol]\n";
  bare("delta_over_gamma", protocol.delta_over_gamma);
  q("l_s", protocol.l_s, "m");
  q("l_sprime", protocol.l_sprime, "m");
  bare("n_sprime", protocol.n_sprime);
  q("v_g", protocol.v_g, "m_per_s");
  q("r_mode", protocol.r_mode, "m");
  q("drag_distance", protocol.drag_distance, "m");
  os << "spreading = " << (protocol.spreading ? "on" : "off") << '\n';
  os << "\n[output]\n";
  os << "dir = " << output.dir << '\n';
  os << "snapshot_stride = " << output.snapshot_stride << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// built-in presets

inline const std::map<std::string, std::string>& config_presets() {
  static const std::map<std::string, std::string> presets = {
      {"paper-guided-mode",
       "# cold-Rb slab, weakly focused gaussian control beam\n"
       "[medium]\n"
       "lambda  = 0.8 um\n"
       "gamma   = 1.8849555921538759e7 rad_per_s\n"
       "density = 1e14 per_cm3\n"
       "length  = 300 um\n"
       "n_s     = 1.012\n"
       "n_c     = 1.0\n"
       "[drive]\n"
       "profile = gaussian\n"
       "a       = 100 um\n"
       "point.0 = 0 s 2.1585056975999996e16 rad2_per_s2 "
       "2.1585056975999996e16 rad2_per_s2\n"
       "[grid]\n"
       "nz    = 512\n"
       "dt    = 6e-15 s\n"
       "l_sim = 1 mm\n"
       "[protocol]\n"
       "v_g = 0.0327022841546676 m_per_s\n"},
      {"paper-bessel",
       "# non-diffracting control beam, first lobe radius 20 um\n"
       "[medium]\n"
       "lambda  = 0.8 um\n"
       "gamma   = 1.8849555921538759e7 rad_per_s\n"
       "density = 1e14 per_cm3\n"
       "length  = 300 um\n"
       "n_s     = 1.012\n"
       "n_c     = 1.0\n"
       "[drive]\n"
       "profile = bessel\n"
       "a       = 20 um\n"
       "point.0 = 0 s 2.1585056975999996e16 rad2_per_s2 "
       "2.1585056975999996e16 rad2_per_s2\n"
       "[grid]\n"
       "nz    = 512\n"
       "dt    = 6e-15 s\n"
       "l_sim = 1 mm\n"
       "[protocol]\n"
       "v_g = 0.0327022841546676 m_per_s\n"},
      {"paper-protocol",
       "# tightly guided probe dragged across one stored excitation\n"
       "[medium]\n"
       "lambda  = 0.8 um\n"
       "gamma   = 1.8849555921538759e7 rad_per_s\n"
       "density = 1e14 per_cm3\n"
       "length  = 300 um\n"
       "n_s     = 1.012\n"
       "n_c     = 1.0\n"
       "[drive]\n"
       "profile = gaussian\n"
       "a       = 100 um\n"
       "point.0 = 0 s 2.1585056975999996e16 rad2_per_s2 "
       "2.1585056975999996e16 rad2_per_s2\n"
       "[grid]\n"
       "nz    = 8192\n"
       "dt    = 4e-15 s\n"
       "l_sim = 11 mm\n"
       "[protocol]\n"
       "delta_over_gamma = 16\n"
       "l_s      = 300 um\n"
       "l_sprime = 75 um\n"
       "n_sprime = 1\n"
       "v_g      = 0.0327022841546676 m_per_s\n"
       "r_mode   = 2 um\n"},
      {"demo-propagate",
       "# synthetic stationary-light demo for the two-field integrator\n"
       "[medium]\n"
       "lambda  = 0.8 um\n"
       "gamma   = 1e7 rad_per_s\n"
       "density = 8e9 per_cm3\n"
       "length  = 0.8 m\n"
       "n_s     = 1.012\n"
       "n_c     = 1.0\n"
       "[drive]\n"
       "profile = gaussian\n"
       "a       = 100 um\n"
       "point.0 = 0 s 9.16e14 rad2_per_s2 9.16e14 rad2_per_s2\n"
       "point.1 = 20 ns 9.16e14 rad2_per_s2 9.16e14 rad2_per_s2\n"
       "[grid]\n"
       "nz    = 1024\n"
       "dt    = 3.2e-12 s\n"
       "l_sim = 1 m\n"
       "pulse_width  = 160 mm\n"
       "pulse_center = 0.5 m\n"
       "[protocol]\n"
       "v_g = 1 m_per_s\n"}};
  return presets;
}

/// Load a config from a file path or from "preset:<name>".
inline ScenarioConfig parse_config(const std::string& path_or_preset) {
  if (path_or_preset.rfind("preset:", 0) == 0) {
    const std::string name = path_or_preset.substr(7);
    auto it = config_presets().find(name);
    if (it == config_presets().end()) {
      std::string known;
      for (const auto& [k, v] : config_presets())
        known += known.empty() ? k : ", " + k;
      throw ValidationError("unknown preset '" + name + "' (available: " +
                            known + ")");
    }
    return parse_config_text(it->second);
  }
  std::ifstream in(path_or_preset);
  if (!in)
    throw ValidationError("cannot open config file '" + path_or_preset + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

} // namespace slp
