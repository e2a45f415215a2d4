#pragma once

// Subcommand bodies behind the fraclossy executable. Argument parsing lives
// in tools/; these take parsed arguments and streams and return exit codes.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fraclossy/acceptance.hpp"
#include "fraclossy/config.hpp"
#include "fraclossy/csv.hpp"
#include "fraclossy/errors.hpp"
#include "fraclossy/frac_core.hpp"
#include "fraclossy/loss_models.hpp"
#include "fraclossy/positive_frac.hpp"
#include "fraclossy/wave_sim.hpp"

namespace fraclossy::cli {

enum ExitCode : int { ok = 0, verification_failed = 1, config_error = 2, numerical_error = 3, instability = 4 };

/// Runs `body`, mapping library exceptions to exit codes with a message on `err`.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InstabilityError& e) {
    err << "error: " << e.what() << '\n';
    return instability;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return numerical_error;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << '\n';
    return config_error;
  }
}

/// Either "-" (standard output) or a file that must open for writing.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw ConfigError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------------------
// operator

struct OperatorArgs {
  std::string kind = "caputo";
  double order = 0.5;
  int k = 0;
  std::string signal;  ///< builtin: poly:N, sin, cos, exp
  std::string input;   ///< CSV with columns t,value
  double t_max = 1.0;
  std::size_t n = 4096;
  double time_scale = 1.0;
  std::string output = "-";
};

inline SampledSignal builtin_signal(const std::string& spec, double t_max, std::size_t n) {
  const auto grid = TimeGrid::spanning(0.0, t_max, n);
  if (spec.rfind("poly:", 0) == 0) {
    const double p = csv::parse_number(spec.substr(5));
    if (p < 0.0) throw ConfigError("poly:N needs N >= 0");
    return SampledSignal::from_function(grid, [p](double t) { return p == 0.0 ? 1.0 : std::pow(t, p); });
  }
  if (spec == "sin") return SampledSignal::from_function(grid, [](double t) { return std::sin(t); });
  if (spec == "cos") return SampledSignal::from_function(grid, [](double t) { return std::cos(t); });
  if (spec == "exp") return SampledSignal::from_function(grid, [](double t) { return std::exp(t); });
  throw ConfigError("unknown builtin signal '" + spec + "' (poly:N, sin, cos, exp)");
}

/// Reads a (t, value) CSV; the time column must be uniformly spaced.
inline SampledSignal read_signal(std::istream& is) {
  const auto t = csv::read(is);
  if (t.columns.size() != 2) throw ConfigError("input CSV must have two columns (t, value)");
  const auto& ts = t.columns[0];
  if (ts.size() < 2) throw ConfigError("input CSV needs at least two rows");
  const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  if (!(dt > 0.0)) throw ConfigError("input CSV: time must increase");
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (std::abs(ts[i] - (ts.front() + static_cast<double>(i) * dt)) > 1e-9 * std::max(1.0, std::abs(ts.back())) + 1e-6 * dt)
      throw ConfigError("input CSV: time column is not uniformly spaced (row " + std::to_string(i + 2) + ")");
  return SampledSignal(TimeGrid{ts.front(), dt, ts.size()}, t.columns[1]);
}

inline SampledSignal apply_operator(const OperatorArgs& a, const SampledSignal& p) {
  PositiveOptions opt;
  opt.time_scale = a.time_scale;
  if (a.kind == "caputo") return caputo_deriv(p, FracOrder(a.order));
  if (a.kind == "rl") return rl_deriv(p, FracOrder(a.order));
  if (a.kind == "positive") return pos_frac_caputo(p, PositiveOrder(a.order), opt);
  if (a.kind == "positive-general") return pos_frac_general(p, a.order, a.k, opt);
  if (a.kind == "szabo") return szabo_operator(p, a.order, opt);
  if (a.kind == "modified") return modified_loss(p, a.order, opt);
  throw ConfigError("unknown operator kind '" + a.kind + "' (caputo, rl, positive, positive-general, szabo, modified)");
}

inline void write_signal(std::ostream& os, const SampledSignal& s) {
  csv::Table t{{"t", "value"}, {std::vector<double>(s.size()), s.values}};
  for (std::size_t i = 0; i < s.size(); ++i) t.columns[0][i] = s.grid.time(i);
  csv::write(os, t);
}

inline int cmd_operator(const OperatorArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    if (a.signal.empty() == a.input.empty()) throw ConfigError("give exactly one of --signal and --input");
    SampledSignal p;
    if (!a.input.empty()) {
      std::ifstream in(a.input);
      if (!in) throw ConfigError("cannot open '" + a.input + "'");
      p = read_signal(in);
    } else {
      p = builtin_signal(a.signal, a.t_max, a.n);
    }
    const auto out = apply_operator(a, p);
    Output o(a.output);
    write_signal(o.stream(), out);
    return static_cast<int>(ok);
  });
}

// ---------------------------------------------------------------------------
// dispersion

struct DispersionArgs {
  double c0 = 1500.0;
  std::optional<double> alpha0;
  std::optional<double> smallness_ratio;  ///< alternative to alpha0, held over the frequency range
  double y = 1.0;
  double f_min_hz = 0.1e6;
  double f_max_hz = 2.0e6;
  std::size_t count = 64;
  std::string output = "-";
};

inline int cmd_dispersion(const DispersionArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    if (a.alpha0.has_value() == a.smallness_ratio.has_value())
      throw ConfigError("give exactly one of --alpha0 and --smallness-ratio");
    if (!(a.f_min_hz > 0.0) || !(a.f_max_hz >= a.f_min_hz)) throw ConfigError("need 0 < f-min <= f-max");
    if (a.count < 1) throw ConfigError("count must be at least 1");
    const double w_lo = 2.0 * std::numbers::pi * a.f_min_hz;
    const double w_hi = 2.0 * std::numbers::pi * a.f_max_hz;
    LossMedium m{a.c0, 0.0, a.y};
    if (a.alpha0) {
      m.alpha0 = *a.alpha0;
    } else {
      if (*a.smallness_ratio < 0.0) throw ConfigError("smallness ratio must be non-negative");
      m.alpha0 = *a.smallness_ratio / (a.c0 * std::pow(a.y >= 1.0 ? w_hi : w_lo, a.y - 1.0));
    }
    m.validate();
    const double ratio = smallness_ratio(m, w_hi, w_lo);
    if (ratio > smallness_threshold)
      err << "warning: smallness ratio " << csv::format_number(ratio) << " exceeds " << smallness_threshold
          << "; the power law no longer approximates the attenuation of the dispersion relation\n";
    csv::Table t{{"omega_rad_s", "beta_rad_m", "alpha_np_m", "alpha_powerlaw_np_m", "smallness_ratio"}, {}};
    t.columns.assign(5, {});
    for (std::size_t i = 0; i < a.count; ++i) {
      const double w = a.count == 1 ? w_lo
                                    : w_lo + (w_hi - w_lo) * static_cast<double>(i) / static_cast<double>(a.count - 1);
      const auto d = dispersion_k(w, m);
      t.columns[0].push_back(w);
      t.columns[1].push_back(d.beta);
      t.columns[2].push_back(d.alpha);
      t.columns[3].push_back(attenuation_law(w, m));
      t.columns[4].push_back(smallness_ratio(m, w));
    }
    Output o(a.output);
    csv::write(o.stream(), t);
    return static_cast<int>(ok);
  });
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config;
  std::string output = "sensors.csv";
  std::string manifest;  ///< default: <output>.manifest
  config::Overrides overrides;
};

inline std::string sensor_column(double x) { return "p_at_" + csv::format_number(x) + "m"; }

inline void write_sensors(std::ostream& os, const std::vector<SensorRecord>& recs) {
  csv::Table t;
  t.header.push_back("t_s");
  const auto& g = recs.at(0).signal.grid;
  t.columns.emplace_back(g.n);
  for (std::size_t i = 0; i < g.n; ++i) t.columns[0][i] = g.time(i);
  for (const auto& r : recs) {
    t.header.push_back(sensor_column(r.x));
    t.columns.push_back(r.signal.values);
  }
  csv::write(os, t);
}

inline int cmd_simulate(const SimulateArgs& a, std::ostream& err) {
  return guarded(err, [&] {
    if (a.config.empty()) throw ConfigError("simulate needs a config file");
    auto res = config::resolve(config::parse_file(a.config), a.overrides);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<SensorRecord> recs;
    try {
      recs = simulate(res.sim);
    } catch (const InstabilityError& e) {
      const double g = stability_probe(res.sim);
      throw InstabilityError(std::string(e.what()) + "; stability_probe growth factor " + csv::format_number(g) +
                                 " (above 1 is unstable; reduce cfl or alpha0)",
                             g);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
      Output o(a.output);
      write_sensors(o.stream(), recs);
    }
    const std::string mpath = a.manifest.empty() ? (a.output == "-" ? std::string() : a.output + ".manifest") : a.manifest;
    if (!mpath.empty()) {
      res.manifest.add("run.config_file", a.config, "command line");
      res.manifest.add("run.sensor_csv", a.output, "command line");
      res.manifest.add("run.wall_time_s", wall, "measured");
      Output m(mpath);
      res.manifest.write(m.stream());
    }
    return static_cast<int>(ok);
  });
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  acceptance::Level level = acceptance::Level::quick;
  double tolerance_scale = 1.0;  ///< test hook: scales every tolerance
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(a.tolerance_scale >= 0.0)) throw ConfigError("tolerance scale must be non-negative");
    const auto results = acceptance::run(a.level, a.tolerance_scale, acceptance::threads_from_env());
    for (const auto& r : results) out << acceptance::format_line(r) << '\n';
    const bool pass = acceptance::all_passed(results);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    out << (pass ? "all " + std::to_string(results.size()) + " checks passed"
                 : std::to_string(failed) + " of " + std::to_string(results.size()) + " checks failed")
        << '\n';
    return static_cast<int>(pass ? ok : verification_failed);
  });
}

}  // namespace fraclossy::cli
