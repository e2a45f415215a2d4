#pragma once

// Run configuration: flat INI-style sections, `key = value`, `#` comments.
// Every value the simulation uses is recorded in a manifest together with its
// origin (config file, command-line override, or default).

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fraclossy/csv.hpp"
#include "fraclossy/errors.hpp"
#include "fraclossy/loss_models.hpp"
#include "fraclossy/reference.hpp"
#include "fraclossy/wave_sim.hpp"

namespace fraclossy::config {

struct Entry {
  std::string value;
  int line = 0;
};

struct Document {
  std::string source_name;
  std::map<std::string, std::map<std::string, Entry>> sections;

  const Entry* find(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }
};

/// Keys accepted in each section.
inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"medium", {"c0", "alpha0", "y", "smallness_ratio", "loss_kind"}},
      {"grid", {"nx", "dx", "points_per_wavelength", "x0", "boundary"}},
      {"source",
       {"center_frequency_hz", "bandwidth_fraction", "delay", "delay_sigmas", "amplitude", "position",
        "position_wavelengths"}},
      {"sensors", {"positions", "positions_fraction"}},
      {"run", {"cfl", "dt", "n_steps", "history_window", "log_time_scale", "max_cfl"}},
  };
  return s;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline Document parse(std::istream& is, const std::string& source_name = "<config>") {
  Document doc;
  doc.source_name = source_name;
  std::string raw;
  std::string section;
  int lineno = 0;
  auto where = [&] { return source_name + ":" + std::to_string(lineno) + ": "; };
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) throw ConfigError(where() + "unknown section [" + section + "]");
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    if (section.empty()) throw ConfigError(where() + "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!schema().at(section).count(key)) throw ConfigError(where() + "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(where() + "empty value for '" + key + "'");
    auto& slot = doc.sections[section];
    if (slot.count(key)) throw ConfigError(where() + "duplicate key '" + key + "'");
    slot[key] = {value, lineno};
  }
  return doc;
}

inline Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

/// Ordered list of resolved parameters.
class Manifest {
 public:
  void add(const std::string& key, const std::string& value, const std::string& origin) {
    entries_.push_back({key, value, origin});
  }
  void add(const std::string& key, double value, const std::string& origin) { add(key, csv::format_number(value), origin); }

  bool contains(const std::string& key) const {
    for (const auto& e : entries_)
      if (e.key == key) return true;
    return false;
  }
  std::string origin(const std::string& key) const {
    for (const auto& e : entries_)
      if (e.key == key) return e.origin;
    return {};
  }
  std::string value(const std::string& key) const {
    for (const auto& e : entries_)
      if (e.key == key) return e.value;
    return {};
  }

  void write(std::ostream& os) const {
    for (const auto& e : entries_) os << e.key << " = " << e.value << "  # " << e.origin << '\n';
  }

 private:
  struct Item {
    std::string key, value, origin;
  };
  std::vector<Item> entries_;
};

struct Overrides {
  std::optional<double> y;
  std::optional<double> alpha0;
  std::optional<LossKind> loss_kind;
  std::optional<double> cfl;
};

struct Resolved {
  SimConfig sim;
  Manifest manifest;
  double smallness_ratio = 0.0;
};

namespace detail {

class Reader {
 public:
  explicit Reader(const Document& d) : doc_(d) {}

  std::optional<std::string> text(const std::string& section, const std::string& key) const {
    const Entry* e = doc_.find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<double> number(const std::string& section, const std::string& key) const {
    const Entry* e = doc_.find(section, key);
    if (!e) return std::nullopt;
    try {
      return csv::parse_number(e->value);
    } catch (const ConfigError&) {
      throw ConfigError(location(*e) + "'" + key + "' is not a number: '" + e->value + "'");
    }
  }

  std::vector<double> list(const std::string& section, const std::string& key) const {
    const Entry* e = doc_.find(section, key);
    std::vector<double> out;
    if (!e) return out;
    for (auto part : csv::split(e->value)) {
      try {
        out.push_back(csv::parse_number(part));
      } catch (const ConfigError&) {
        throw ConfigError(location(*e) + "'" + key + "' must be a comma-separated list of numbers");
      }
    }
    return out;
  }

  std::string location(const std::string& section, const std::string& key) const {
    const Entry* e = doc_.find(section, key);
    return e ? location(*e) : doc_.source_name + ": ";
  }

  std::string origin(const std::string& section, const std::string& key) const {
    const Entry* e = doc_.find(section, key);
    return e ? "config line " + std::to_string(e->line) : "default";
  }

 private:
  std::string location(const Entry& e) const { return doc_.source_name + ":" + std::to_string(e.line) + ": "; }

  const Document& doc_;
};

inline void require_positive(double v, const std::string& what, const std::string& where) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + what + " must be positive");
}

inline std::size_t as_count(double v, const std::string& what, const std::string& where) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) throw ConfigError(where + what + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

/// Build the simulation configuration, filling every missing key from the
/// reference setup and recording all values in the manifest.
inline Resolved resolve(const Document& doc, const Overrides& ov = {}) {
  Resolved r;
  Manifest& man = r.manifest;
  detail::Reader rd(doc);
  SimConfig& cfg = r.sim;

  // source
  const double f_hz = rd.number("source", "center_frequency_hz").value_or(reference::center_frequency_hz);
  detail::require_positive(f_hz, "center_frequency_hz", rd.location("source", "center_frequency_hz"));
  cfg.source.center_frequency_hz = f_hz;
  man.add("source.center_frequency_hz", f_hz, rd.origin("source", "center_frequency_hz"));
  man.add("source.center_frequency_rad_s", 2.0 * std::numbers::pi * f_hz, "converted: 2 pi * center_frequency_hz");
  cfg.source.bandwidth_fraction = rd.number("source", "bandwidth_fraction").value_or(reference::bandwidth_fraction);
  detail::require_positive(cfg.source.bandwidth_fraction, "bandwidth_fraction",
                           rd.location("source", "bandwidth_fraction"));
  man.add("source.bandwidth_fraction", cfg.source.bandwidth_fraction, rd.origin("source", "bandwidth_fraction"));
  cfg.source.amplitude = rd.number("source", "amplitude").value_or(1.0);
  detail::require_positive(cfg.source.amplitude, "amplitude", rd.location("source", "amplitude"));
  man.add("source.amplitude", cfg.source.amplitude, rd.origin("source", "amplitude"));
  if (auto d = rd.number("source", "delay")) {
    if (rd.number("source", "delay_sigmas")) throw ConfigError(rd.location("source", "delay") + "give delay or delay_sigmas, not both");
    cfg.source.delay = *d;
    man.add("source.delay_s", *d, rd.origin("source", "delay"));
  } else {
    const double k = rd.number("source", "delay_sigmas").value_or(reference::delay_sigmas);
    cfg.source.delay = k * cfg.source.sigma();
    man.add("source.delay_sigmas", k, rd.origin("source", "delay_sigmas"));
    man.add("source.delay_s", cfg.source.delay, "derived: delay_sigmas * sigma");
  }
  man.add("source.sigma_s", cfg.source.sigma(), "derived: 1 / (bandwidth_fraction * omega_c)");

  // medium
  cfg.medium.c0 = rd.number("medium", "c0").value_or(reference::c0);
  detail::require_positive(cfg.medium.c0, "c0", rd.location("medium", "c0"));
  man.add("medium.c0_m_s", cfg.medium.c0, rd.origin("medium", "c0"));
  cfg.medium.y = rd.number("medium", "y").value_or(1.0);
  std::string y_origin = rd.origin("medium", "y");
  if (ov.y) {
    cfg.medium.y = *ov.y;
    y_origin = "override --y";
  }
  if (!(cfg.medium.y >= 0.0 && cfg.medium.y <= 2.0)) throw ConfigError(rd.location("medium", "y") + "y must lie in [0, 2]");
  man.add("medium.y", cfg.medium.y, y_origin);

  const auto alpha_cfg = rd.number("medium", "alpha0");
  const auto ratio_cfg = rd.number("medium", "smallness_ratio");
  if (alpha_cfg && ratio_cfg)
    throw ConfigError(rd.location("medium", "alpha0") + "give alpha0 or smallness_ratio, not both");
  if (ov.alpha0) {
    cfg.medium.alpha0 = *ov.alpha0;
    man.add("medium.alpha0", cfg.medium.alpha0, "override --alpha0");
  } else if (alpha_cfg) {
    cfg.medium.alpha0 = *alpha_cfg;
    man.add("medium.alpha0", cfg.medium.alpha0, rd.origin("medium", "alpha0"));
  } else {
    const double ratio = ratio_cfg.value_or(reference::smallness);
    man.add("medium.smallness_ratio_target", ratio, rd.origin("medium", "smallness_ratio"));
    cfg.medium.alpha0 = reference::alpha0_for_ratio(cfg.medium.y, ratio, cfg.medium.c0, cfg.source);
    man.add("medium.alpha0", cfg.medium.alpha0, "derived: smallness ratio over the pulse band");
  }
  if (!(cfg.medium.alpha0 >= 0.0) || !std::isfinite(cfg.medium.alpha0))
    throw ConfigError(rd.location("medium", "alpha0") + "alpha0 must be non-negative");

  cfg.loss_kind = loss_kind_from_string(rd.text("medium", "loss_kind").value_or("modified"));
  std::string kind_origin = rd.origin("medium", "loss_kind");
  if (ov.loss_kind) {
    cfg.loss_kind = *ov.loss_kind;
    kind_origin = "override --loss-kind";
  }
  man.add("medium.loss_kind", to_string(cfg.loss_kind), kind_origin);

  // grid
  if (auto dx = rd.number("grid", "dx")) {
    if (rd.number("grid", "points_per_wavelength"))
      throw ConfigError(rd.location("grid", "dx") + "give dx or points_per_wavelength, not both");
    detail::require_positive(*dx, "dx", rd.location("grid", "dx"));
    cfg.grid.dx = *dx;
    man.add("grid.dx_m", *dx, rd.origin("grid", "dx"));
  } else {
    const double ppw = rd.number("grid", "points_per_wavelength").value_or(reference::points_per_wavelength);
    detail::require_positive(ppw, "points_per_wavelength", rd.location("grid", "points_per_wavelength"));
    cfg.grid.dx = cfg.medium.c0 / (f_hz * ppw);
    man.add("grid.points_per_wavelength", ppw, rd.origin("grid", "points_per_wavelength"));
    man.add("grid.dx_m", cfg.grid.dx, "derived: c0 / (f * points_per_wavelength)");
  }
  cfg.grid.nx = detail::as_count(rd.number("grid", "nx").value_or(static_cast<double>(reference::nx)), "nx",
                                 rd.location("grid", "nx"));
  man.add("grid.nx", std::to_string(cfg.grid.nx), rd.origin("grid", "nx"));
  cfg.grid.x0 = rd.number("grid", "x0").value_or(0.0);
  man.add("grid.x0_m", cfg.grid.x0, rd.origin("grid", "x0"));
  cfg.boundary = boundary_from_string(rd.text("grid", "boundary").value_or("reflective-zero"));
  man.add("grid.boundary", to_string(cfg.boundary), rd.origin("grid", "boundary"));
  if (cfg.grid.nx < 16) throw ConfigError(rd.location("grid", "nx") + "nx must be at least 16");
  const double length = cfg.grid.length();

  if (auto x = rd.number("source", "position")) {
    if (rd.number("source", "position_wavelengths"))
      throw ConfigError(rd.location("source", "position") + "give position or position_wavelengths, not both");
    cfg.source.position = *x;
    man.add("source.position_m", *x, rd.origin("source", "position"));
  } else {
    const double w = rd.number("source", "position_wavelengths").value_or(reference::source_offset_wavelengths);
    cfg.source.position = cfg.grid.x0 + w * cfg.medium.c0 / f_hz;
    man.add("source.position_wavelengths", w, rd.origin("source", "position_wavelengths"));
    man.add("source.position_m", cfg.source.position, "derived: x0 + position_wavelengths * c0 / f");
  }

  // sensors
  auto abs_pos = rd.list("sensors", "positions");
  auto frac_pos = rd.list("sensors", "positions_fraction");
  if (!abs_pos.empty() && !frac_pos.empty())
    throw ConfigError(rd.location("sensors", "positions") + "give positions or positions_fraction, not both");
  if (!abs_pos.empty()) {
    cfg.sensors = abs_pos;
    man.add("sensors.origin", "positions", rd.origin("sensors", "positions"));
  } else {
    if (frac_pos.empty()) frac_pos = {0.25, 0.75};
    for (double f : frac_pos) cfg.sensors.push_back(cfg.grid.x0 + f * length);
    std::ostringstream os;
    for (std::size_t i = 0; i < frac_pos.size(); ++i) os << (i ? "," : "") << csv::format_number(frac_pos[i]);
    man.add("sensors.positions_fraction", os.str(), rd.origin("sensors", "positions_fraction"));
  }
  {
    std::ostringstream os;
    for (std::size_t i = 0; i < cfg.sensors.size(); ++i) os << (i ? "," : "") << csv::format_number(cfg.sensors[i]);
    man.add("sensors.positions_m", os.str(), "resolved");
  }

  // run
  if (auto dt = rd.number("run", "dt"); dt && !ov.cfl) {
    if (rd.number("run", "cfl")) throw ConfigError(rd.location("run", "dt") + "give dt or cfl, not both");
    detail::require_positive(*dt, "dt", rd.location("run", "dt"));
    cfg.dt = *dt;
    man.add("run.dt_s", *dt, rd.origin("run", "dt"));
    man.add("run.cfl", cfg.cfl(), "derived: c0 dt / dx");
  } else {
    double cfl = rd.number("run", "cfl").value_or(reference::cfl);
    std::string origin = rd.origin("run", "cfl");
    if (ov.cfl) {
      cfl = *ov.cfl;
      origin = "override --cfl";
    }
    detail::require_positive(cfl, "cfl", rd.location("run", "cfl"));
    cfg.dt = cfl * cfg.grid.dx / cfg.medium.c0;
    man.add("run.cfl", cfl, origin);
    man.add("run.dt_s", cfg.dt, "derived: cfl dx / c0");
  }
  cfg.n_steps = detail::as_count(rd.number("run", "n_steps").value_or(static_cast<double>(reference::n_steps)),
                                 "n_steps", rd.location("run", "n_steps"));
  man.add("run.n_steps", std::to_string(cfg.n_steps), rd.origin("run", "n_steps"));
  cfg.history_window = detail::as_count(rd.number("run", "history_window").value_or(0.0), "history_window",
                                        rd.location("run", "history_window"));
  man.add("run.history_window", std::to_string(cfg.history_window),
          rd.origin("run", "history_window") + (cfg.history_window == 0 ? " (0 = full history)" : ""));
  cfg.max_cfl = rd.number("run", "max_cfl").value_or(cfg.max_cfl);
  man.add("run.max_cfl", cfg.max_cfl, rd.origin("run", "max_cfl"));
  cfg.log_time_scale = rd.number("run", "log_time_scale").value_or(0.0);
  man.add("run.log_time_scale_s", cfg.resolved_time_scale(),
          doc.find("run", "log_time_scale") ? rd.origin("run", "log_time_scale") : "default: 1 / omega_c");

  try {
    cfg.validate();
  } catch (const Error& e) {
    throw ConfigError(doc.source_name + ": " + e.what());
  }

  // scheme constants
  man.add("scheme.time", "leapfrog, second-order central", "fixed");
  man.add("scheme.space", "second-order central Laplacian", "fixed");
  man.add("scheme.loss_lag", "loss term evaluated at t_n when advancing to t_{n+1}", "fixed");
  man.add("scheme.blowup_factor", cfg.blowup_factor, "fixed");
  man.add("scheme.points_per_wavelength", cfg.points_per_wavelength(), "derived");
  r.smallness_ratio = cfg.medium.alpha0 > 0.0
                          ? smallness_ratio(cfg.medium, reference::band_hi(cfg.source), reference::band_lo(cfg.source))
                          : 0.0;
  man.add("medium.smallness_ratio", r.smallness_ratio, "derived: over the pulse band");
  return r;
}

}  // namespace fraclossy::config
