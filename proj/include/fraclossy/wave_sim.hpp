#pragma once

// Explicit 1-D solver for the lossy wave equation
//
//     p_xx = (1/c0^2) p_tt + (2 alpha0 / c0) L[p],     L = Q_y (modified) or S_y (Szabo)
//
// Leapfrog in time, second-order central in space. The memory term is
// evaluated at t_n from the node's history p_0..p_n when advancing to t_{n+1}.
// Its value is the last sample of the corresponding full-signal operator
// (modified_loss / szabo_operator) applied to that history.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fraclossy/errors.hpp"
#include "fraclossy/fft.hpp"
#include "fraclossy/loss_models.hpp"
#include "fraclossy/positive_frac.hpp"
#include "fraclossy/quadrature.hpp"
#include "fraclossy/signal.hpp"

namespace fraclossy {

enum class Boundary { periodic, reflective_zero };

inline std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "reflective-zero"; }

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "reflective-zero" || s == "reflective") return Boundary::reflective_zero;
  throw ConfigError("unknown boundary '" + s + "' (expected periodic or reflective-zero)");
}

/// Gaussian-modulated sinusoid injected as a soft point source. The forcing is
/// scaled so that each outgoing lossless wave is amplitude * pulse(t - |x - x_s|/c0).
struct PulseSource {
  double center_frequency_hz = 1.0e6;
  double bandwidth_fraction = 0.25;  ///< sigma_omega / omega_c
  double delay = 0.0;                ///< s, time of the envelope peak
  double amplitude = 1.0;
  double position = 0.0;  ///< m

  double omega_c() const { return 2.0 * std::numbers::pi * center_frequency_hz; }
  /// Envelope standard deviation in time.
  double sigma() const { return 1.0 / (bandwidth_fraction * omega_c()); }

  double pulse(double t) const {
    const double u = t - delay;
    const double s = sigma();
    return amplitude * std::exp(-u * u / (2.0 * s * s)) * std::sin(omega_c() * u);
  }
  double pulse_rate(double t) const {
    const double u = t - delay;
    const double s = sigma();
    const double env = std::exp(-u * u / (2.0 * s * s));
    const double w = omega_c();
    return amplitude * env * (w * std::cos(w * u) - (u / (s * s)) * std::sin(w * u));
  }
};

struct SpatialGrid {
  double x0 = 0.0;
  double dx = 1.0;
  std::size_t nx = 16;

  double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
  double length() const noexcept { return dx * static_cast<double>(nx - 1); }
};

struct SimConfig {
  LossMedium medium;
  SpatialGrid grid;
  double dt = 0.0;
  std::size_t n_steps = 0;
  PulseSource source;
  std::vector<double> sensors;
  Boundary boundary = Boundary::reflective_zero;
  LossKind loss_kind = LossKind::modified;
  std::size_t history_window = 0;  ///< 0: full history
  double max_cfl = 4.0;            ///< sanity bound; stability itself is checked empirically
  double log_time_scale = 0.0;     ///< odd-order log-kernel reference; 0 selects 1/omega_c
  double blowup_factor = 1.0e6;

  double cfl() const { return medium.c0 * dt / grid.dx; }
  double points_per_wavelength() const { return medium.c0 / (source.center_frequency_hz * grid.dx); }
  double resolved_time_scale() const { return log_time_scale > 0.0 ? log_time_scale : 1.0 / source.omega_c(); }

  void validate(bool check_resolution = true) const {
    medium.validate();
    if (!(grid.dx > 0.0)) throw ConfigError("grid: dx must be positive");
    if (grid.nx < 16) throw ConfigError("grid: need at least 16 points");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (n_steps < 8) throw ConfigError("n_steps must be at least 8");
    if (history_window != 0 && history_window < 32) throw ConfigError("history_window must be 0 or at least 32 steps");
    if (!(cfl() <= max_cfl)) throw ConfigError("CFL number exceeds the configured bound");
    if (!(source.center_frequency_hz > 0.0)) throw ConfigError("source: center frequency must be positive");
    if (!(source.bandwidth_fraction > 0.0)) throw ConfigError("source: bandwidth fraction must be positive");
    if (!(source.amplitude > 0.0)) throw ConfigError("source: amplitude must be positive");
    const double x_end = grid.x(grid.nx - 1);
    if (source.position < grid.x0 || source.position > x_end) throw ConfigError("source outside the domain");
    if (sensors.empty()) throw ConfigError("at least one sensor is required");
    for (double s : sensors)
      if (s < grid.x0 || s > x_end) throw ConfigError("sensor outside the domain");
    if (check_resolution && points_per_wavelength() < 10.0)
      throw ConfigError("source center frequency under-resolved (< 10 points per wavelength)");
  }
};

struct SensorRecord {
  double x;
  SampledSignal signal;
};

/// Pressure on the grid plus its full time history (time-major).
struct Field1D {
  double x0 = 0.0;
  double dx = 1.0;
  std::size_t nx = 0;
  std::vector<std::vector<double>> p_history;
  std::size_t t_index = 0;
  double cfl = 0.0;
};

struct SimResult {
  Field1D field;
  std::vector<SensorRecord> sensors;
};

namespace detail {

/*
 * Per-node incremental evaluation of the loss operator at the newest sample.
 * Integrand values whose finite-difference stencils are still open (the last
 * few samples) are recomputed every step from a short window with the same
 * fd routines the full-signal operators use.
 */
class LossStepper {
 public:
  LossStepper(const SimConfig& cfg) : y_(cfg.medium.y), h_(cfg.dt), nx_(cfg.grid.nx), cap_(cfg.n_steps + 1) {
    kind_ = cfg.loss_kind;
    window_ = cfg.history_window;
    opt_.time_scale = cfg.resolved_time_scale();
    active_ = kind_ != LossKind::lossless && cfg.medium.alpha0 > 0.0;
    if (!active_) return;
    p_.assign(nx_ * cap_, 0.0);
    const bool edge = (y_ == 0.0 || y_ == 2.0);
    if (edge) {
      mode_ = Mode::integer;
    } else if (kind_ == LossKind::modified) {
      mode_ = Mode::modified;
      branch_ = positive_branch(y_, 0);
      make_kernel(branch_.nu);
      f_.assign(nx_ * cap_, 0.0);
    } else if (y_ == 1.0) {
      mode_ = Mode::szabo_log;
      branch_ = positive_branch(1.0, 0);
      make_kernel(1.0);
      f_.assign(nx_ * cap_, 0.0);
    } else {
      mode_ = Mode::szabo_gl;
      gl_ = std::make_unique<quadrature::ShiftedGrunwald>(y_ + 1.0, h_, cap_);
      aux_.assign(nx_ * cap_, 0.0);
      cos_ = std::cos(y_ * std::numbers::pi / 2.0);
    }
  }

  bool active() const noexcept { return active_; }

  /// Record p_n at every node and return L[p](t_n) per node.
  void step(std::size_t n, const std::vector<double>& p, std::vector<double>& out) {
    if (!active_) return;
    for (std::size_t i = 0; i < nx_; ++i) p_[i * cap_ + n] = p[i];
    if (n < 4) {
      std::fill(out.begin(), out.end(), 0.0);
      if (mode_ == Mode::szabo_gl) {
        for (std::size_t i = 0; i < nx_; ++i) aux_[i * cap_ + n] = gl_->raw_at_last(node_p(i, n));
      }
      return;
    }
    for (std::size_t i = 0; i < nx_; ++i) out[i] = evaluate(i, n);
  }

 private:
  enum class Mode { integer, modified, szabo_log, szabo_gl };
  static constexpr std::size_t kWindow = 16;
  static constexpr std::size_t kTail = 4;

  void make_kernel(double nu) {
    nu_ = nu;
    static const int offsets[] = {-2, -1, 0, 1, 2};
    for (int m = 1; m <= 3; ++m) centred_[static_cast<std::size_t>(m)] = fd::stencil_weights(offsets, m);
    if (nu == 1.0) {
      log_ = std::make_unique<quadrature::LogKernelWeights>(h_, opt_.time_scale * std::exp(-euler_gamma), cap_);
    } else {
      pow_ = std::make_unique<quadrature::PowerKernelWeights>(1.0 - nu, h_, cap_);
    }
  }

  std::span<const double> node_p(std::size_t i, std::size_t n) const {
    return std::span<const double>(p_.data() + i * cap_, n + 1);
  }

  std::size_t first_index(std::size_t n) const { return (window_ > 0 && n + 1 > window_) ? n + 1 - window_ : 0; }

  /*
   * Kernel integral of the integrand f = D^q p against K(s) = s^{-nu}. When
   * the history is truncated at a = t_first, the dropped part is integrated by
   * parts (p and its derivatives vanish at t0):
   *
   *   int_0^a f K(t - tau) = sum_{r=1..q} D^{q-r} p(a) K^{(r-1)}(t - a) + int_0^a p K^{(q)},
   *
   * and only the last term, whose kernel decays like s^{-nu-q}, is neglected.
   * The h/2 term removes the half hat that the truncated rule keeps left of a.
   */
  double kernel_at(std::size_t i, std::size_t n) const {
    const std::span<const double> f(f_.data() + i * cap_, n + 1);
    const std::size_t first = first_index(n);
    double acc = log_ ? log_->at_last(f, first) : pow_->at_last(f, first);
    if (first == 0) return acc;
    const auto pn = node_p(i, n);
    const double W = static_cast<double>(n - first) * h_;
    const int q = branch_.derivative_order + 1;
    double dk = std::pow(W, -nu_);  // K^{(r-1)}(W)
    double tail = -0.5 * h_ * f[first] * dk;
    for (int r = 1; r <= q; ++r) {
      tail += centred_derivative(pn, first, q - r) * dk;
      dk *= (-nu_ - static_cast<double>(r - 1)) / W;
    }
    return acc + tail;
  }

  // D^m p at sample j from the five-point centred stencil
  double centred_derivative(std::span<const double> p, std::size_t j, int m) const {
    if (m == 0) return p[j];
    const auto& w = centred_[static_cast<std::size_t>(m)];
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) acc += w[static_cast<std::size_t>(k)] * (p[j + static_cast<std::size_t>(k) - 2] - p[j]);
    return acc / std::pow(h_, m);
  }

  std::vector<double> integrand_window(std::span<const double> w) const {
    return detail::positive_integrand(w, h_, branch_, 1);
  }

  /// Refresh the open tail of the integrand history of node i.
  void update_integrand(std::size_t i, std::size_t n) {
    const auto pn = node_p(i, n);
    const std::size_t s = n + 1 > kWindow ? n + 1 - kWindow : 0;
    const auto w = integrand_window(pn.subspan(s));
    const std::size_t from = s == 0 ? 0 : n + 1 - kTail;
    double* f = f_.data() + i * cap_;
    for (std::size_t j = from; j <= n; ++j) f[j] = w[j - s];
  }

  double evaluate(std::size_t i, std::size_t n) {
    const auto pn = node_p(i, n);
    switch (mode_) {
      case Mode::integer: {
        const std::size_t s = n + 1 > kWindow ? n + 1 - kWindow : 0;
        const auto w = pn.subspan(s);
        if (y_ == 0.0) return fd::first(w, h_).back();
        return -fd::derivative(w, h_, 3).back();
      }
      case Mode::modified: {
        update_integrand(i, n);
        return branch_.prefactor * kernel_at(i, n);
      }
      case Mode::szabo_log: {
        update_integrand(i, n);
        const double q1 = branch_.prefactor * kernel_at(i, n);
        // boundary terms of the RL-type form, from the first three samples
        const double d0 = fd::first(pn.first(3), h_)[0];
        const double t = static_cast<double>(n) * h_;
        return q1 + (2.0 / std::numbers::pi) * (d0 / t - pn[0] / (t * t));
      }
      case Mode::szabo_gl: {
        double* raw = aux_.data() + i * cap_;
        raw[n] = gl_->raw_at_last(pn, first_index(n));
        return gl_->grid_value(std::span<const double>(raw, n + 1), n, true, pn[0], pn[1]) / cos_;
      }
    }
    return 0.0;
  }

  double y_;
  double h_;
  std::size_t nx_;
  std::size_t cap_;
  LossKind kind_;
  std::size_t window_;
  PositiveOptions opt_;
  bool active_ = false;
  Mode mode_ = Mode::integer;
  PositiveBranch branch_{};
  double cos_ = 1.0;
  double nu_ = 1.0;
  std::array<std::vector<double>, 4> centred_;
  std::vector<double> p_, f_, aux_;
  std::unique_ptr<quadrature::PowerKernelWeights> pow_;
  std::unique_ptr<quadrature::LogKernelWeights> log_;
  std::unique_ptr<quadrature::ShiftedGrunwald> gl_;
};

struct Stencil {
  std::size_t i0;
  double w0;
  double w1;
};

inline Stencil locate(const SpatialGrid& g, double x) {
  double u = (x - g.x0) / g.dx;
  u = std::clamp(u, 0.0, static_cast<double>(g.nx - 1));
  auto i0 = static_cast<std::size_t>(std::floor(u));
  if (i0 >= g.nx - 1) i0 = g.nx - 2;
  const double frac = u - static_cast<double>(i0);
  return {i0, 1.0 - frac, frac};
}

/// Leapfrog energy between two consecutive states (exactly conserved without loss and source).
inline long double discrete_energy(const std::vector<double>& prev, const std::vector<double>& cur, double dt,
                                   double dx, double c, Boundary b) {
  const std::size_t nx = cur.size();
  long double e = 0.0L;
  for (std::size_t i = 0; i < nx; ++i) {
    const long double v = (static_cast<long double>(cur[i]) - prev[i]) / dt;
    e += v * v;
  }
  const long double c2 = static_cast<long double>(c) * c / (static_cast<long double>(dx) * dx);
  const std::size_t edges = b == Boundary::periodic ? nx : nx - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const std::size_t j = (i + 1) % nx;
    e += c2 * (static_cast<long double>(cur[j]) - cur[i]) * (static_cast<long double>(prev[j]) - prev[i]);
  }
  return e;
}

struct RunOptions {
  bool throw_on_blowup = true;
  bool keep_history = true;
  std::vector<std::size_t> energy_steps;
};

struct RunOutput {
  SimResult result;
  std::vector<long double> energies;
  double peak_ratio = 0.0;
};

inline RunOutput run(const SimConfig& cfg, const RunOptions& ro) {
  const std::size_t nx = cfg.grid.nx;
  const double c = cfg.medium.c0;
  const double r2 = cfg.cfl() * cfg.cfl();
  const double dt2 = cfg.dt * cfg.dt;
  const double loss_coef = 2.0 * cfg.medium.alpha0 * c;
  const bool periodic = cfg.boundary == Boundary::periodic;
  const Stencil src = locate(cfg.grid, cfg.source.position);

  std::vector<Stencil> sens;
  for (double x : cfg.sensors) sens.push_back(locate(cfg.grid, x));

  RunOutput out;
  Field1D& field = out.result.field;
  field.x0 = cfg.grid.x0;
  field.dx = cfg.grid.dx;
  field.nx = nx;
  field.cfl = cfg.cfl();

  std::vector<std::vector<double>> sensor_values(sens.size(), std::vector<double>(cfg.n_steps));
  std::vector<double> prev(nx, 0.0), cur(nx, 0.0), next(nx, 0.0), loss(nx, 0.0);
  LossStepper stepper(cfg);
  const double limit = cfg.blowup_factor * cfg.source.amplitude;
  double peak = 0.0;

  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    field.t_index = n;
    if (ro.keep_history) field.p_history.push_back(cur);
    for (std::size_t s = 0; s < sens.size(); ++s)
      sensor_values[s][n] = sens[s].w0 * cur[sens[s].i0] + sens[s].w1 * cur[sens[s].i0 + 1];

    const bool want_energy =
        std::find(ro.energy_steps.begin(), ro.energy_steps.end(), n) != ro.energy_steps.end();
    if (want_energy) out.energies.push_back(discrete_energy(prev, cur, cfg.dt, cfg.grid.dx, c, cfg.boundary));
    if (n + 1 == cfg.n_steps) break;

    stepper.step(n, cur, loss);
    for (std::size_t i = 0; i < nx; ++i) {
      double lap;
      if (periodic) {
        const std::size_t im = i == 0 ? nx - 1 : i - 1;
        const std::size_t ip = i + 1 == nx ? 0 : i + 1;
        lap = cur[ip] - 2.0 * cur[i] + cur[im];
      } else {
        if (i == 0 || i + 1 == nx) {
          next[i] = 0.0;
          continue;
        }
        lap = cur[i + 1] - 2.0 * cur[i] + cur[i - 1];
      }
      double v = 2.0 * cur[i] - prev[i] + r2 * lap;
      if (stepper.active()) v -= dt2 * loss_coef * loss[i];
      next[i] = v;
    }
    const double force = dt2 * 2.0 * c * cfg.source.pulse_rate(static_cast<double>(n) * cfg.dt) / cfg.grid.dx;
    next[src.i0] += src.w0 * force;
    next[src.i0 + 1] += src.w1 * force;
    if (!periodic) {
      next[0] = 0.0;
      next[nx - 1] = 0.0;
    }

    double mx = 0.0;
    for (double v : next) mx = std::max(mx, std::abs(v));
    if (!std::isfinite(mx)) mx = HUGE_VAL;
    peak = std::max(peak, mx);
    if (ro.throw_on_blowup && mx > limit)
      throw InstabilityError("simulation blew up at step " + std::to_string(n + 1), mx / cfg.source.amplitude);
    prev.swap(cur);
    cur.swap(next);
  }
  out.peak_ratio = peak / cfg.source.amplitude;
  TimeGrid tg{0.0, cfg.dt, cfg.n_steps};
  for (std::size_t s = 0; s < sens.size(); ++s)
    out.result.sensors.push_back({cfg.sensors[s], SampledSignal(tg, std::move(sensor_values[s]))});
  return out;
}

}  // namespace detail

/// Full run: sensor records plus the field history.
inline SimResult simulate_field(const SimConfig& cfg) {
  cfg.validate();
  return detail::run(cfg, {}).result;
}

/// Sensor records of a full run.
inline std::vector<SensorRecord> simulate(const SimConfig& cfg) {
  cfg.validate();
  detail::RunOptions ro;
  ro.keep_history = false;
  return detail::run(cfg, ro).result.sensors;
}

/// Short broadband run (256 steps) on the configured medium and grid; returns
/// the growth of the leapfrog energy norm between steps 128 and 256,
/// sqrt(E_256 / E_128). Values above 1 flag an unstable (dt, dx, alpha0) setup.
inline double stability_probe(const SimConfig& cfg) {
  cfg.validate(false);
  SimConfig probe = cfg;
  probe.n_steps = 257;
  probe.history_window = 0;
  probe.blowup_factor = HUGE_VAL;
  // roughly six points per wavelength, emitted well before step 128
  probe.source.center_frequency_hz = cfg.medium.c0 / (6.0 * cfg.grid.dx);
  probe.source.bandwidth_fraction = 0.5;
  probe.source.delay = 4.0 * probe.source.sigma();
  probe.source.position = cfg.grid.x0 + 0.5 * cfg.grid.length();
  probe.sensors = {probe.source.position};
  detail::RunOptions ro;
  ro.throw_on_blowup = false;
  ro.keep_history = false;
  ro.energy_steps = {128, 256};
  const auto out = detail::run(probe, ro);
  const long double e_mid = out.energies.at(0);
  const long double e_end = out.energies.at(1);
  if (!(e_mid > 0.0L)) return HUGE_VAL;
  const long double g = std::sqrt(e_end / e_mid);
  return std::isfinite(static_cast<double>(g)) ? static_cast<double>(g) : HUGE_VAL;
}

enum class OracleDispersion { szabo, causal_model };

/// Spectral plane-wave propagation of src over `distance`: every component is
/// multiplied by e^{i k(omega) distance}. The default uses dispersion_k; the
/// causal_model variant uses the wave model's own symbol (model_dispersion_k).
inline SampledSignal plane_wave_oracle(const LossMedium& medium, const SampledSignal& src, double distance,
                                       OracleDispersion model = OracleDispersion::szabo,
                                       const PositiveOptions& opt = {}) {
  medium.validate();
  src.validate();
  if (distance < 0.0) throw DomainError("plane_wave_oracle: distance must be non-negative");
  if (distance == 0.0) return src;
  // circular on the record's own bins, so a spectral measurement inverts it exactly
  const std::size_t n = src.size();
  auto X = fft::forward(src.values);
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * src.dt());
  for (std::size_t k = 0; k < X.size(); ++k) {
    const double w = dw * static_cast<double>(k);
    const auto kp = model == OracleDispersion::szabo ? dispersion_k(w, medium) : model_dispersion_k(w, medium, opt);
    X[k] *= std::exp(std::complex<double>(0.0, 1.0) * kp.k() * distance);
  }
  return src.with_values(fft::inverse(X, n));
}

}  // namespace fraclossy
