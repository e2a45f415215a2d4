#pragma once

// Acceptance checks 1-11, shared by the acceptance test binary and the
// `verify` subcommand. Tolerances are fixed here; `tolerance_scale` multiplies
// every tolerance (a scale of 0 forces failures, used to test the reporting
// path).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fraclossy/analysis.hpp"
#include "fraclossy/frac_core.hpp"
#include "fraclossy/loss_models.hpp"
#include "fraclossy/positive_frac.hpp"
#include "fraclossy/reference.hpp"
#include "fraclossy/wave_sim.hpp"

namespace fraclossy::acceptance {

enum class Level { quick, full };

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string metric;
  double seconds = 0.0;
};

namespace detail {

class Report {
 public:
  explicit Report(double scale) : scale_(scale) {}

  double tol(double t) const { return t * scale_; }

  /// Record value <= limit (limit already scaled by the caller).
  void at_most(const std::string& what, double value, double limit) {
    const bool ok = value <= limit;
    note(what + "=" + fmt(value) + (ok ? "<=" : ">") + fmt(limit), ok);
  }
  void at_least(const std::string& what, double value, double limit) {
    const bool ok = value >= limit;
    note(what + "=" + fmt(value) + (ok ? ">=" : "<") + fmt(limit), ok);
  }
  void note(const std::string& text, bool ok) {
    ok_ = ok_ && ok;
    (ok ? ok_text_ : failures_).push_back(text);
  }
  void info(const std::string& text) { info_.push_back(text); }

  bool ok() const { return ok_; }
  std::string summary() const {
    std::ostringstream os;
    const auto& lines = ok_ ? ok_text_ : failures_;
    for (std::size_t i = 0; i < lines.size() && i < 12; ++i) os << (i ? "; " : "") << lines[i];
    if (lines.size() > 12) os << "; (+" << lines.size() - 12 << " more)";
    for (const auto& s : info_) os << "; " << s;
    return os.str();
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

 private:
  double scale_;
  bool ok_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> ok_text_;
  std::vector<std::string> info_;
};

inline std::string order_tag(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", mu);
  return buf;
}

// 1: Caputo of t and t^2 against closed forms, plus observed orders.
inline void closed_form(Report& r) {
  const std::size_t n = 4096;
  const auto grid = TimeGrid::spanning(0.0, 1.0, n);
  double worst = 0.0;
  for (double beta : {1.0, 2.0}) {
    for (double mu : {0.3, 0.5, 1.5}) {
      const auto psi = SampledSignal::from_function(grid, [&](double t) { return std::pow(t, beta); });
      const auto d = caputo_deriv(psi, FracOrder(mu));
      std::vector<double> exact(n);
      for (std::size_t i = 0; i < n; ++i) exact[i] = fraclossy::detail::exact_caputo_power(beta, mu, grid.time(i));
      worst = std::max(worst, relative_l2(d.values, exact));
    }
  }
  r.at_most("max rel L2", worst, r.tol(1e-3));
  // t^1 and t^2 are reproduced to rounding; t^2.5 exercises the order
  for (double beta : {1.0, 2.0, 2.5}) {
    for (double mu : {0.3, 0.5, 1.5}) {
      const auto rows = convergence_study(ConvergenceCase::caputo(beta, mu, 256), 4);
      const std::string tag = "order(t^" + order_tag(beta) + ",mu=" + order_tag(mu) + ")";
      if (all_exact(rows)) r.note(tag + "=exact", true);
      else r.at_least(tag, final_order(rows), (2.0 - (mu - std::floor(mu)) - 0.2) / r.tol(1.0));
    }
  }
}

// 2: Caputo of a constant.
inline void annihilation(Report& r) {
  const double c = 3.7;
  const std::size_t n = 4096;
  const auto grid = TimeGrid::spanning(0.0, 1.0, n);
  const auto psi = SampledSignal::from_function(grid, [&](double) { return c; });
  for (double mu : {0.3, 0.5, 1.5}) {
    const auto d = caputo_deriv(psi, FracOrder(mu));
    double mx = 0.0;
    for (double v : d.values) mx = std::max(mx, std::abs(v));
    r.at_most("max|D^" + order_tag(mu) + " c|", mx, r.tol(1e-10 * c / grid.dt));
  }
}

// 3: RL (GL path) minus Caputo (product integration) equals psi(t0) theta_{-mu}.
inline void a5_identity(Report& r) {
  const std::size_t n = 4096;
  const double mu = 0.5;
  const auto grid = TimeGrid::spanning(0.0, 2.0, n);
  const auto psi = SampledSignal::from_function(grid, [](double t) { return 1.0 + std::sin(t); });
  const auto rl = rl_deriv(psi, FracOrder(mu));
  const auto cd = caputo_deriv(psi, FracOrder(mu));
  double worst = 0.0;
  for (std::size_t i = n / 100; i + 1 < n; ++i) {
    const double expect = psi.values[0] * theta_kernel(-mu, grid.time(i));
    worst = std::max(worst, std::abs((rl.values[i] - cd.values[i]) / expect - 1.0));
  }
  r.at_most("max rel err", worst, r.tol(1e-2));
}

// 4: series reduction against the direct Caputo derivative.
inline void a11_series(Report& r) {
  const std::size_t n = 4096;
  const auto grid = TimeGrid::spanning(0.0, 1.0, n);
  const auto psi = SampledSignal::from_function(grid, [](double t) { return t * t; });
  const auto a = caputo_via_series(psi, FracOrder(1.5));
  const auto b = caputo_deriv(psi, FracOrder(1.5));
  const std::span<const double> va(a.values), vb(b.values);
  r.at_most("rel L2", relative_l2(va.subspan(1), vb.subspan(1)), r.tol(1e-2));
}

struct SymbolProbe {
  std::vector<double> omega;
  std::vector<std::complex<double>> H;
};

// Band-limited pulse centred in the record (clear of the first quarter) and
// the Tukey-windowed transfer function of `op` on its 95%
// energy band.
inline SymbolProbe probe_symbol(const std::function<SampledSignal(const SampledSignal&)>& op) {
  const std::size_t n = 8192;
  const TimeGrid grid{0.0, 16.0 / static_cast<double>(n), n};
  const double wc = 2.0 * std::numbers::pi * 8.0;
  const double sig = 0.15;
  const auto p = SampledSignal::from_function(grid, [&](double t) {
    const double u = t - 8.0;
    return std::exp(-u * u / (2.0 * sig * sig)) * std::sin(wc * u);
  });
  const auto out = op(p);
  const auto H = transfer(p, out, Window::tukey(0.25));
  const auto band = energy_band(spectrum(p), 0.95);
  SymbolProbe s;
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.dt);
  for (std::size_t k = band.k_lo; k <= band.k_hi; ++k) {
    s.omega.push_back(dw * static_cast<double>(k));
    s.H.push_back(H[k]);
  }
  return s;
}

// worst |Re[H / (-i w)^q] / |w|^eta - 1| over the probe band
inline double symbol_error(const SymbolProbe& s, double eta, int q) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    const double w = s.omega[i];
    const auto h = s.H[i] / std::pow(std::complex<double>(0.0, -w), q);
    worst = std::max(worst, std::abs(h.real() / std::pow(w, eta) - 1.0));
  }
  return worst;
}

inline double magnitude_ratio_range(const SymbolProbe& s, double eta) {
  double lo = HUGE_VAL, hi = 0.0;
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    const double m = std::abs(s.H[i]) / std::pow(s.omega[i], eta);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return hi / lo - 1.0;
}

// 5: spectral symbol of the positive derivative.
inline void positive_symbol_check(Report& r) {
  PositiveOptions opt;
  opt.time_scale = 1.0 / (2.0 * std::numbers::pi * 8.0);
  double worst = 0.0;
  for (double eta : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75}) {
    const auto s = probe_symbol([&](const SampledSignal& p) { return pos_frac_caputo(p, PositiveOrder(eta), opt); });
    const double e = symbol_error(s, eta, 0);
    worst = std::max(worst, e);
    if (e > r.tol(0.05)) r.at_most("eta=" + order_tag(eta), e, r.tol(0.05));
  }
  r.at_most("max |Re H/|w|^eta - 1| (eta 0.25..1.75)", worst, r.tol(0.05));
  const auto g = probe_symbol([&](const SampledSignal& p) { return pos_frac_general(p, 2.5, 1, opt); });
  r.at_most("eta=2.5 (k=1)", symbol_error(g, 2.5, 0), r.tol(0.05));
  const auto s75 = probe_symbol([&](const SampledSignal& p) { return pos_frac_caputo(p, PositiveOrder(0.75), opt); });
  r.info("|H|/|w|^0.75 spread over band " + Report::fmt(magnitude_ratio_range(s75, 0.75)) + " (magnitude not used)");
}

// 6: composition with an integer derivative.
inline void composition_check(Report& r) {
  const auto s = probe_symbol([](const SampledSignal& p) { return compose_with_integer(p, PositiveOrder(0.5), 1); });
  r.at_most("max |Re[H/(-iw)]/|w|^0.5 - 1|", symbol_error(s, 0.5, 1), r.tol(0.05));
}

// 7: small-attenuation limit of the dispersion relation.
inline void dispersion_limit(Report& r) {
  const double c = 1500.0;
  const double w = 2.0 * std::numbers::pi * 1.0e6;
  double worst = 0.0;
  std::ostringstream at_bound;
  for (double y : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    for (double ratio : {0.01, 0.1}) {
      const LossMedium m{c, ratio / (c * std::pow(w, y - 1.0)), y};
      const double q = dispersion_k(w, m).alpha / attenuation_law(w, m);
      if (ratio == 0.01) worst = std::max(worst, std::abs(q - 1.0));
      else at_bound << (y == 0.0 ? "" : ",") << Report::fmt(q - 1.0);
    }
  }
  r.at_most("max |alpha/(alpha0 w^y) - 1| at ratio 0.01", worst, r.tol(0.01));
  r.info("deviation at ratio 0.1 for y=0,0.5,1,1.5,2: " + at_bound.str());
}

// 8: fit o measure o plane_wave_oracle round trip.
inline void oracle_round_trip(Report& r) {
  PulseSource src;
  src.center_frequency_hz = reference::center_frequency_hz;
  src.bandwidth_fraction = reference::bandwidth_fraction;
  src.delay = reference::delay_sigmas * src.sigma();
  const std::size_t n = 8192;
  const TimeGrid grid{0.0, 2.0e-9, n};
  const auto near = SampledSignal::from_function(grid, [&](double t) { return src.pulse(t); });
  const double distance = 0.01;
  for (double y : {0.3, 0.7, 1.0, 1.3, 1.7}) {
    const LossMedium m{reference::c0, reference::alpha0_for_ratio(y, reference::smallness, reference::c0, src), y};
    const auto far = plane_wave_oracle(m, near, distance);
    const auto meas = measure_attenuation({0.0, near}, {distance, far});
    const auto fit = fit_power_law(meas.samples);
    const std::string tag = "y=" + order_tag(y);
    r.at_most(tag + " |dy|", std::abs(fit.y_hat - y), r.tol(0.02));
    r.at_most(tag + " |da0|/a0", std::abs(fit.alpha0_hat / m.alpha0 - 1.0), r.tol(0.05));
  }
}

struct LoopRun {
  double y;
  PowerLawFit fit;
  std::size_t negative = 0;
  std::size_t bins = 0;
  double norm_near = 0.0;
  double norm_far = 0.0;
};

inline LoopRun loop_run(double y, LossKind kind) {
  const auto cfg = reference::config(y, kind);
  const auto rec = simulate(cfg);
  const auto a = reference::gated(cfg, rec[0]);
  const auto b = reference::gated(cfg, rec[1]);
  const auto meas = measure_attenuation(a, b);
  LoopRun out{y, fit_power_law(meas.samples), meas.negative_count, meas.samples.size(), 0.0, 0.0};
  out.fit.alpha0_hat /= cfg.medium.alpha0;  // stored relative to truth
  out.norm_near = rms(rec[0].signal.values);
  out.norm_far = rms(rec[1].signal.values);
  return out;
}

// Lossless periodic run: the right-going pulse passes the sensor, travels once
// around the domain and passes again; compares the two passes' L2 norms
// (first) and peak amplitudes (second).
inline std::pair<double, double> lossless_transit_change() {
  auto cfg = reference::config(1.0, LossKind::lossless);
  cfg.medium.alpha0 = 0.0;
  cfg.boundary = Boundary::periodic;
  const double period = cfg.grid.dx * static_cast<double>(cfg.grid.nx);
  const double d = 0.25 * period;
  cfg.sensors = {cfg.source.position + d};
  const double first = cfg.source.delay + d / cfg.medium.c0;
  const double again = first + period / cfg.medium.c0;
  const double half = reference::gate_sigmas * cfg.source.sigma();
  cfg.n_steps = static_cast<std::size_t>(std::ceil((again + half) / cfg.dt)) + 2;
  const auto rec = simulate(cfg).at(0).signal;
  const auto p1 = time_gate(rec, first - half, first + half);
  const auto p2 = time_gate(rec, again - half, again + half);
  auto peak = [](const SampledSignal& p) {
    double m = 0.0;
    for (double v : p.values) m = std::max(m, std::abs(v));
    return m;
  };
  return {std::abs(rms(p2.values) / rms(p1.values) - 1.0), std::abs(peak(p2) / peak(p1) - 1.0)};
}

/// Shared state of the simulation criteria (9-11).
struct LoopResults {
  std::vector<LoopRun> modified;
  std::vector<LoopRun> szabo;
  std::pair<double, double> lossless_change{0.0, 0.0};
};

inline LoopResults run_loops(unsigned threads) {
  LoopResults L;
  const double ys[] = {0.5, 1.0, 1.5};
  if (threads > 1) {
    std::vector<std::future<LoopRun>> fm, fs;
    for (double y : ys) fm.push_back(std::async(std::launch::async, loop_run, y, LossKind::modified));
    for (double y : ys) fs.push_back(std::async(std::launch::async, loop_run, y, LossKind::szabo));
    auto fl = std::async(std::launch::async, lossless_transit_change);
    for (auto& f : fm) L.modified.push_back(f.get());
    for (auto& f : fs) L.szabo.push_back(f.get());
    L.lossless_change = fl.get();
  } else {
    for (double y : ys) L.modified.push_back(loop_run(y, LossKind::modified));
    for (double y : ys) L.szabo.push_back(loop_run(y, LossKind::szabo));
    L.lossless_change = lossless_transit_change();
  }
  return L;
}

inline void full_loop(Report& r, const LoopResults& L) {
  for (const auto& run : L.modified) {
    const std::string tag = "y=" + order_tag(run.y);
    r.at_most(tag + " |dy|", std::abs(run.fit.y_hat - run.y), r.tol(0.1));
    r.at_most(tag + " |da0|/a0", std::abs(run.fit.alpha0_hat - 1.0), r.tol(0.15));
  }
  r.at_most("lossless transit |dL2|", L.lossless_change.first, r.tol(0.01));
  r.info("lossless transit |dpeak| " + Report::fmt(L.lossless_change.second));
}

inline void quiescent_equivalence(Report& r, const LoopResults& L) {
  for (std::size_t i = 0; i < L.modified.size(); ++i) {
    const auto& m = L.modified[i];
    const auto& s = L.szabo[i];
    const double d = std::max(std::abs(s.norm_near / m.norm_near - 1.0), std::abs(s.norm_far / m.norm_far - 1.0));
    r.at_most("y=" + order_tag(m.y) + " |dL2|", d, r.tol(0.02));
  }
}

inline void positivity(Report& r, const LoopResults& L) {
  for (const auto& run : L.modified) {
    const bool ok = run.negative == 0 && r.tol(1.0) > 0.0;
    r.note("y=" + order_tag(run.y) + " negative bins " + std::to_string(run.negative) + "/" + std::to_string(run.bins), ok);
  }
}

template <class F>
CheckResult timed(int id, const std::string& name, double scale, double budget_s, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r(scale);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.note(std::string("exception: ") + e.what(), false);
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0) r.at_most("runtime_s", sec, budget_s);
  return {id, name, r.ok(), r.summary(), sec};
}

}  // namespace detail

inline unsigned threads_from_env() {
  const char* v = std::getenv("FRACLOSSY_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || n < 1) return 1;
  return static_cast<unsigned>(std::min<long>(n, 64));
}

/// Criteria 1-8 (quick) or 1-11 (full), in fixed order.
inline std::vector<CheckResult> run(Level level, double tolerance_scale = 1.0, unsigned threads = 1) {
  using detail::timed;
  const double s = tolerance_scale;
  std::vector<CheckResult> out;
  out.push_back(timed(1, "closed-form Caputo derivatives", s, 5.0, detail::closed_form));
  out.push_back(timed(2, "Caputo annihilates constants", s, 0.0, detail::annihilation));
  out.push_back(timed(3, "RL - Caputo boundary identity", s, 0.0, detail::a5_identity));
  out.push_back(timed(4, "series reduction (m = 2)", s, 0.0, detail::a11_series));
  out.push_back(timed(5, "positive-derivative spectral symbol", s, 30.0, detail::positive_symbol_check));
  out.push_back(timed(6, "composition with D^1", s, 0.0, detail::composition_check));
  out.push_back(timed(7, "dispersion small-attenuation limit", s, 0.0, detail::dispersion_limit));
  out.push_back(timed(8, "oracle round trip", s, 10.0, detail::oracle_round_trip));
  if (level == Level::quick) return out;

  detail::LoopResults loops;
  const auto t0 = std::chrono::steady_clock::now();
  std::string loop_error;
  try {
    loops = detail::run_loops(threads);
  } catch (const std::exception& e) {
    loop_error = e.what();
  }
  const double loop_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto with_loops = [&](int id, const std::string& name, auto body, double budget) {
    auto res = timed(id, name, s, 0.0, [&](detail::Report& r) {
      if (!loop_error.empty()) {
        r.note("simulation failed: " + loop_error, false);
        return;
      }
      body(r, loops);
      if (budget > 0.0) r.at_most("simulation runtime_s", loop_s, budget);
    });
    res.seconds += loop_s;
    return res;
  };
  out.push_back(with_loops(9, "full simulation loop recovery", detail::full_loop, 300.0));
  out.push_back(with_loops(10, "Szabo vs modified (quiescent)", detail::quiescent_equivalence, 0.0));
  out.push_back(with_loops(11, "positivity of measured alpha", detail::positivity, 0.0));
  return out;
}

inline bool all_passed(const std::vector<CheckResult>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const CheckResult& r) { return r.passed; });
}

inline std::string format_line(const CheckResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] criterion %2d  %-38s (%.2fs)  ", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds);
  return head + r.metric;
}

}  // namespace fraclossy::acceptance
