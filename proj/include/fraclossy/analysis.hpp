#pragma once

// Spectral estimation, two-sensor attenuation, power-law fitting and
// convergence studies.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fraclossy/errors.hpp"
#include "fraclossy/fft.hpp"
#include "fraclossy/frac_core.hpp"
#include "fraclossy/signal.hpp"
#include "fraclossy/wave_sim.hpp"

namespace fraclossy {

enum class WindowKind { rectangular, tukey, hann };

/// Taper applied before the transform. For tukey, `fraction` is the tapered
/// share of the record (split between both ends).
struct Window {
  WindowKind kind = WindowKind::rectangular;
  double fraction = 0.1;

  static Window rectangular() { return {}; }
  static Window tukey(double f) { return {WindowKind::tukey, f}; }
  static Window hann() { return {WindowKind::hann, 1.0}; }

  double weight(std::size_t i, std::size_t n) const {
    if (kind == WindowKind::rectangular || n < 2) return 1.0;
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    const double f = kind == WindowKind::hann ? 1.0 : std::clamp(fraction, 0.0, 1.0);
    if (f == 0.0) return 1.0;
    const double edge = 0.5 * f;
    if (u < edge) return 0.5 * (1.0 - std::cos(std::numbers::pi * u / edge));
    if (u > 1.0 - edge) return 0.5 * (1.0 - std::cos(std::numbers::pi * (1.0 - u) / edge));
    return 1.0;
  }
};

/// One-sided DFT: raw magnitude (sum of samples, no dt factor) and unwrapped
/// phase, e^{+i omega t} convention.
struct Spectrum {
  std::vector<double> omega;
  std::vector<double> magnitude;
  std::vector<double> phase;
  std::size_t n_samples = 0;
  double dt = 0.0;

  std::size_t size() const noexcept { return omega.size(); }
  double bin_width() const { return 2.0 * std::numbers::pi / (static_cast<double>(n_samples) * dt); }
};

inline std::vector<double> unwrap(std::vector<double> phase) {
  const double two_pi = 2.0 * std::numbers::pi;
  double offset = 0.0;
  for (std::size_t i = 1; i < phase.size(); ++i) {
    const double raw = phase[i] + offset;
    const double d = raw - phase[i - 1];
    if (d > std::numbers::pi) offset -= two_pi * std::round(d / two_pi);
    else if (d < -std::numbers::pi) offset += two_pi * std::round(-d / two_pi);
    phase[i] += offset;
  }
  return phase;
}

inline std::vector<std::complex<double>> windowed_transform(const SampledSignal& s, const Window& w) {
  std::vector<double> x(s.values);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= w.weight(i, x.size());
  return fft::forward(x);
}

inline Spectrum spectrum(const SampledSignal& s, const Window& w = Window::rectangular()) {
  s.validate();
  if (s.size() < 64) throw DomainError("spectrum: need at least 64 samples");
  const auto X = windowed_transform(s, w);
  Spectrum out;
  out.n_samples = s.size();
  out.dt = s.dt();
  const double dw = out.bin_width();
  out.omega.resize(X.size());
  out.magnitude.resize(X.size());
  std::vector<double> ph(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) {
    out.omega[k] = dw * static_cast<double>(k);
    out.magnitude[k] = std::abs(X[k]);
    ph[k] = std::arg(X[k]);
  }
  out.phase = unwrap(std::move(ph));
  return out;
}

/// Signal energy sum |x|^2 dt recovered from the one-sided spectrum (Parseval).
inline double spectral_energy(const Spectrum& sp) {
  const std::size_t n = sp.n_samples;
  double acc = 0.0;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    const bool single = k == 0 || (n % 2 == 0 && k == n / 2);
    acc += (single ? 1.0 : 2.0) * sp.magnitude[k] * sp.magnitude[k];
  }
  return acc * sp.dt / static_cast<double>(n);
}

struct Band {
  double lo;
  double hi;
  std::size_t k_lo;
  std::size_t k_hi;
};

/// Smallest set of bins (taken by decreasing energy) holding `fraction` of the
/// one-sided energy, reported as the bin range it spans.
inline Band energy_band(const Spectrum& sp, double fraction = 0.95) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("energy_band: fraction must lie in (0, 1]");
  std::vector<std::size_t> idx(sp.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> e(sp.size());
  double total = 0.0;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    e[k] = sp.magnitude[k] * sp.magnitude[k];
    total += e[k];
  }
  if (!(total > 0.0)) throw DomainError("energy_band: zero signal");
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return e[a] > e[b]; });
  double acc = 0.0;
  std::size_t lo = idx[0], hi = idx[0];
  for (std::size_t k : idx) {
    lo = std::min(lo, k);
    hi = std::max(hi, k);
    acc += e[k];
    if (acc >= fraction * total) break;
  }
  return {sp.omega[lo], sp.omega[hi], lo, hi};
}

/// Measured transfer function out/in on the bins of `band`.
inline std::vector<std::complex<double>> transfer(const SampledSignal& in, const SampledSignal& out,
                                                  const Window& w = Window::rectangular()) {
  if (in.size() != out.size()) throw DomainError("transfer: length mismatch");
  const auto X = windowed_transform(in, w);
  const auto Y = windowed_transform(out, w);
  std::vector<std::complex<double>> H(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) H[k] = std::abs(X[k]) > 0.0 ? Y[k] / X[k] : 0.0;
  return H;
}

inline double rms(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return v.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(v.size()));
}

/// ||a - b|| / ||b||, or the RMS difference when b vanishes.
inline double relative_l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("relative_l2: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) return std::sqrt(num / static_cast<double>(std::max<std::size_t>(a.size(), 1)));
  return std::sqrt(num / den);
}

/// Keep [t_start, t_end] of the record with raised-cosine edges of width
/// `taper`; zero elsewhere.
inline SampledSignal time_gate(const SampledSignal& s, double t_start, double t_end, double taper = 0.0) {
  if (!(t_end > t_start)) throw DomainError("time_gate: empty gate");
  auto out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.grid.time(i);
    double w = 0.0;
    if (t >= t_start && t <= t_end) {
      w = 1.0;
      if (taper > 0.0) {
        if (t < t_start + taper) w = 0.5 * (1.0 - std::cos(std::numbers::pi * (t - t_start) / taper));
        else if (t > t_end - taper) w = 0.5 * (1.0 - std::cos(std::numbers::pi * (t_end - t) / taper));
      }
    }
    out.values[i] *= w;
  }
  return out;
}

struct AttenuationSample {
  double omega;
  double alpha;
};

struct AttenuationMeasurement {
  std::vector<AttenuationSample> samples;
  std::size_t negative_count = 0;  ///< bins where the far record is louder than the near one

  bool has_negative() const noexcept { return negative_count > 0; }
};

/// alpha(omega) = ln(|S_near| / |S_far|) / dx on the bins where the near
/// spectrum exceeds `gate` times its peak (DC excluded).
inline AttenuationMeasurement measure_attenuation(const SensorRecord& near, const SensorRecord& far,
                                                  double gate = 0.05) {
  const double dx = far.x - near.x;
  if (dx == 0.0) throw DomainError("measure_attenuation: sensors coincide");
  if (dx < 0.0) throw DomainError("measure_attenuation: far sensor must lie beyond the near one");
  if (near.signal.size() != far.signal.size() || near.signal.dt() != far.signal.dt())
    throw DomainError("measure_attenuation: records sampled differently");
  const auto sn = spectrum(near.signal);
  const auto sf = spectrum(far.signal);
  const double peak = *std::max_element(sn.magnitude.begin() + 1, sn.magnitude.end());
  AttenuationMeasurement m;
  for (std::size_t k = 1; k < sn.size(); ++k) {
    if (sn.magnitude[k] < gate * peak) continue;
    if (!(sf.magnitude[k] > 0.0)) continue;
    const double a = std::log(sn.magnitude[k] / sf.magnitude[k]) / dx;
    if (a < 0.0) ++m.negative_count;
    m.samples.push_back({sn.omega[k], a});
  }
  if (m.samples.size() < 8)
    throw DomainError("measure_attenuation: fewer than 8 usable frequency samples above the gate");
  return m;
}

struct PowerLawFit {
  double alpha0_hat;
  double y_hat;
  double r_squared;
  double band_lo;
  double band_hi;
};

/// Unweighted least squares of ln alpha on ln omega.
inline PowerLawFit fit_power_law(std::span<const AttenuationSample> samples) {
  if (samples.size() < 8) throw DomainError("fit_power_law: need at least 8 samples");
  std::ostringstream bad;
  std::size_t n_bad = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].omega > 0.0)) throw DomainError("fit_power_law: omega must be positive");
    if (!(samples[i].alpha > 0.0)) {
      if (n_bad++ < 16) bad << (n_bad > 1 ? ", " : "") << "bin " << i << " (omega=" << samples[i].omega
                            << ", alpha=" << samples[i].alpha << ")";
    }
  }
  if (n_bad > 0)
    throw DomainError("fit_power_law: " + std::to_string(n_bad) + " non-positive alpha sample(s): " + bad.str());
  const double n = static_cast<double>(samples.size());
  double mx = 0.0, my = 0.0;
  for (const auto& s : samples) {
    mx += std::log(s.omega);
    my += std::log(s.alpha);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& s : samples) {
    const double dx = std::log(s.omega) - mx;
    const double dy = std::log(s.alpha) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || std::all_of(samples.begin(), samples.end(), [&](const auto& s) { return s.omega == samples[0].omega; }))
    throw DomainError("fit_power_law: all samples at one frequency");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (const auto& s : samples) {
    const double r = std::log(s.alpha) - (intercept + slope * std::log(s.omega));
    ss_res += r * r;
  }
  double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  r2 = std::clamp(r2, 0.0, 1.0);
  double lo = samples[0].omega, hi = samples[0].omega;
  for (const auto& s : samples) {
    lo = std::min(lo, s.omega);
    hi = std::max(hi, s.omega);
  }
  return {std::exp(intercept), slope, r2, lo, hi};
}

inline PowerLawFit fit_power_law(const std::vector<AttenuationSample>& samples) {
  return fit_power_law(std::span<const AttenuationSample>(samples));
}

// ---------------------------------------------------------------------------
// Convergence studies

enum class ConvergenceOp { caputo_power, frac_integral_power, frac_integral_sin, lossless_wave };

/// A refinement experiment with a closed-form oracle.
struct ConvergenceCase {
  ConvergenceOp op = ConvergenceOp::caputo_power;
  double order = 0.5;  ///< mu or q
  double beta = 1.0;   ///< exponent of psi = t^beta
  double t_max = 1.0;
  std::size_t base_n = 256;

  static ConvergenceCase caputo(double beta, double mu, std::size_t base_n = 256) {
    return {ConvergenceOp::caputo_power, mu, beta, 1.0, base_n};
  }
  static ConvergenceCase integral(double beta, double q, std::size_t base_n = 256) {
    return {ConvergenceOp::frac_integral_power, q, beta, 1.0, base_n};
  }
  static ConvergenceCase integral_sin(double q, std::size_t base_n = 256) {
    return {ConvergenceOp::frac_integral_sin, q, 0.0, 4.0, base_n};
  }
  static ConvergenceCase wave(std::size_t base_nx = 128) { return {ConvergenceOp::lossless_wave, 0.0, 0.0, 0.0, base_nx}; }
};

struct ConvergenceRow {
  double dt;
  double error;
  double observed_order;  ///< NaN on the first level and when an error is at rounding level
  bool exact;             ///< error at rounding level: the scheme reproduces the oracle
};

namespace detail {

inline double exact_caputo_power(double beta, double mu, double t) {
  // D^mu t^beta vanishes when beta is an integer below ceil(mu)
  const int m = static_cast<int>(std::ceil(mu));
  if (beta == std::floor(beta) && beta < m) return 0.0;
  if (t == 0.0) return 0.0;
  return gamma(beta + 1.0) / gamma(beta + 1.0 - mu) * std::pow(t, beta - mu);
}

inline double exact_integral_power(double beta, double q, double t) {
  if (t == 0.0) return 0.0;
  return gamma(beta + 1.0) / gamma(beta + 1.0 + q) * std::pow(t, beta + q);
}

// J^q sin t = t^{q+1} sum_k (-1)^k t^{2k} / Gamma(2k + q + 2)
inline double exact_integral_sin(double q, double t) {
  double acc = 0.0;
  double tp = std::pow(t, q + 1.0);
  for (int k = 0; k < 60; ++k) {
    const double term = tp / std::tgamma(2.0 * k + q + 2.0);
    acc += (k % 2 == 0) ? term : -term;
    tp *= t * t;
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
  }
  return acc;
}

inline std::pair<double, double> operator_error(const ConvergenceCase& c, std::size_t n) {
  const auto grid = TimeGrid::spanning(0.0, c.t_max, n + 1);
  std::vector<double> exact(grid.n);
  SampledSignal out;
  switch (c.op) {
    case ConvergenceOp::caputo_power: {
      const auto psi = SampledSignal::from_function(grid, [&](double t) { return std::pow(t, c.beta); });
      out = caputo_deriv(psi, FracOrder(c.order));
      for (std::size_t i = 0; i < grid.n; ++i) exact[i] = exact_caputo_power(c.beta, c.order, grid.time(i));
      break;
    }
    case ConvergenceOp::frac_integral_power: {
      const auto psi = SampledSignal::from_function(grid, [&](double t) { return std::pow(t, c.beta); });
      out = frac_integral(psi, FracOrder(c.order));
      for (std::size_t i = 0; i < grid.n; ++i) exact[i] = exact_integral_power(c.beta, c.order, grid.time(i));
      break;
    }
    case ConvergenceOp::frac_integral_sin: {
      const auto psi = SampledSignal::from_function(grid, [](double t) { return std::sin(t); });
      out = frac_integral(psi, FracOrder(c.order));
      for (std::size_t i = 0; i < grid.n; ++i) exact[i] = exact_integral_sin(c.order, grid.time(i));
      break;
    }
    case ConvergenceOp::lossless_wave: break;
  }
  return {grid.dt, relative_l2(out.values, exact)};
}

// Lossless pulse against its d'Alembert solution pulse(t - |x - x_s|/c0),
// before any reflection reaches the sensor. dx and dt are halved together.
inline std::pair<double, double> wave_error(std::size_t nx) {
  SimConfig cfg;
  cfg.medium = {1500.0, 0.0, 1.0};
  cfg.loss_kind = LossKind::lossless;
  cfg.boundary = Boundary::reflective_zero;
  const double length = 0.1;
  cfg.grid = {0.0, length / static_cast<double>(nx - 1), nx};
  cfg.dt = 0.3 * cfg.grid.dx / cfg.medium.c0;
  cfg.source.center_frequency_hz = 1.5e5;
  cfg.source.bandwidth_fraction = 0.25;
  cfg.source.delay = 5.0 * cfg.source.sigma();
  cfg.source.position = cfg.grid.x(static_cast<std::size_t>(0.25 * static_cast<double>(nx - 1)));
  const double sensor = cfg.grid.x(static_cast<std::size_t>(0.5 * static_cast<double>(nx - 1)));
  cfg.sensors = {sensor};
  const double travel = (sensor - cfg.source.position) / cfg.medium.c0;
  const double t_end = cfg.source.delay + travel + 5.0 * cfg.source.sigma();
  cfg.n_steps = static_cast<std::size_t>(std::ceil(t_end / cfg.dt)) + 1;
  const auto rec = simulate(cfg).at(0).signal;
  std::vector<double> exact(rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) exact[i] = cfg.source.pulse(rec.grid.time(i) - travel);
  return {cfg.dt, relative_l2(rec.values, exact)};
}

}  // namespace detail

/// Error at `levels` successive halvings of the step, with pairwise observed
/// orders log2(e_{l-1}/e_l).
inline std::vector<ConvergenceRow> convergence_study(const ConvergenceCase& c, std::size_t levels) {
  if (levels < 2) throw DomainError("convergence_study: need at least two levels");
  constexpr double rounding = 1e-12;
  std::vector<ConvergenceRow> rows;
  for (std::size_t l = 0; l < levels; ++l) {
    const std::size_t n = c.base_n << l;
    const auto [dt, err] = c.op == ConvergenceOp::lossless_wave ? detail::wave_error(n) : detail::operator_error(c, n);
    ConvergenceRow row{dt, err, std::numeric_limits<double>::quiet_NaN(), err < rounding};
    if (l > 0 && !row.exact && !rows.back().exact) row.observed_order = std::log2(rows.back().error / err);
    rows.push_back(row);
  }
  return rows;
}

/// Order from the last pair of levels (NaN if unavailable).
inline double final_order(const std::vector<ConvergenceRow>& rows) {
  return rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().observed_order;
}

inline bool all_exact(const std::vector<ConvergenceRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.exact; });
}

}  // namespace fraclossy
