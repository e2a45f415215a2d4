#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fraclossy/errors.hpp"
#include "fraclossy/frac_core.hpp"
#include "fraclossy/positive_frac.hpp"
#include "fraclossy/signal.hpp"

namespace fraclossy {

/// Homogeneous lossy medium: alpha(omega) = alpha0 |omega|^y.
struct LossMedium {
  double c0 = 1500.0;   ///< m/s
  double alpha0 = 0.0;  ///< Np (rad/s)^-y / m
  double y = 1.0;

  void validate() const {
    if (!(c0 > 0.0) || !std::isfinite(c0)) throw DomainError("LossMedium: c0 must be positive");
    if (!(alpha0 >= 0.0) || !std::isfinite(alpha0)) throw DomainError("LossMedium: alpha0 must be non-negative");
    if (!(y >= 0.0 && y <= 2.0)) throw DomainError("LossMedium: y must lie in [0, 2]");
  }
};

/// k = beta + i alpha at one angular frequency.
struct DispersionPoint {
  double omega;
  double beta;
  double alpha;

  std::complex<double> k() const { return {beta, alpha}; }
};

/// Threshold of the conservative smallness condition alpha0 |omega|^{y-1} c0 <= 0.1.
inline constexpr double smallness_threshold = 0.1;

inline double attenuation_law(double omega, const LossMedium& m) {
  if (m.y == 0.0) return m.alpha0;
  return m.alpha0 * std::pow(std::abs(omega), m.y);
}

namespace detail {
inline DispersionPoint decaying_root(double omega, std::complex<double> k2) {
  auto k = std::sqrt(k2);  // principal branch: Re >= 0
  if (k.imag() < 0.0) k = -k;
  return {omega, k.real(), k.imag()};
}
}  // namespace detail

/// Szabo's dispersion relation k^2 = (omega/c0)^2 + 2i (omega/c0) alpha0 |omega|^y,
/// forward-decaying root.
inline DispersionPoint dispersion_k(double omega, const LossMedium& m) {
  m.validate();
  if (omega < 0.0) throw DomainError("dispersion_k: omega must be non-negative");
  const double kw = omega / m.c0;
  if (m.alpha0 == 0.0) return {omega, kw, 0.0};
  const std::complex<double> k2(kw * kw, 2.0 * kw * attenuation_law(omega, m));
  return detail::decaying_root(omega, k2);
}

/// max over [omega_min, omega_max] of alpha0 |omega|^{y-1} c0. The maximum
/// sits at omega_max for y >= 1 and at omega_min for y < 1.
inline double smallness_ratio(const LossMedium& m, double omega_max, double omega_min) {
  m.validate();
  if (!(omega_max > 0.0)) throw DomainError("smallness_ratio: omega_max must be positive");
  if (omega_min < 0.0 || omega_min > omega_max) throw DomainError("smallness_ratio: bad band");
  if (m.alpha0 == 0.0) return 0.0;
  const double w = m.y >= 1.0 ? omega_max : omega_min;
  if (w == 0.0) return HUGE_VAL;
  return m.alpha0 * std::pow(w, m.y - 1.0) * m.c0;
}

inline double smallness_ratio(const LossMedium& m, double omega_max) {
  return smallness_ratio(m, omega_max, omega_max);
}

enum class LossKind { modified, szabo, lossless };

inline std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::modified: return "modified";
    case LossKind::szabo: return "szabo";
    case LossKind::lossless: return "lossless";
  }
  return "?";
}

inline LossKind loss_kind_from_string(const std::string& s) {
  if (s == "modified") return LossKind::modified;
  if (s == "szabo") return LossKind::szabo;
  if (s == "lossless") return LossKind::lossless;
  throw ConfigError("unknown loss kind '" + s + "' (expected modified, szabo or lossless)");
}

namespace detail {
inline void require_loss_exponent(double y) {
  if (!(y >= 0.0 && y <= 2.0)) throw DomainError("loss exponent y must lie in [0, 2]");
}

inline SampledSignal negated_third(const SampledSignal& p) {
  auto d3 = derivative(p, 3);
  for (double& v : d3.values) v = -v;
  return d3;
}
}  // namespace detail

/// Modified (Caputo-type) loss operator Q_y p = D^{|y|+1} p = D^|y| (D^1 p).
/// y = 0 gives D^1 p, y = 2 gives -D^3 p, y = 1 is the log-kernel row.
inline SampledSignal modified_loss(const SampledSignal& p, double y, const PositiveOptions& opt = {}) {
  detail::require_loss_exponent(y);
  if (y == 0.0) return derivative(p, 1);
  if (y == 2.0) return detail::negated_third(p);
  return compose_with_integer(p, PositiveOrder(y), 1, opt);
}

namespace detail {
/// (2/pi) (D^1 p(t0) / t - p(t0) / t^2): the boundary terms that separate
/// S_1 from Q_1. Zero at t0 itself.
inline std::vector<double> szabo_unit_boundary(const SampledSignal& p) {
  const double p0 = p.values[0];
  const double d0 = fd::first(p.values, p.dt())[0];
  std::vector<double> b(p.size(), 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double t = p.grid.time(i) - p.grid.t0;
    b[i] = (2.0 / std::numbers::pi) * (d0 / t - p0 / (t * t));
  }
  return b;
}
}  // namespace detail

/// Causal Szabo operator S_y p = D^1 [ D*^y p / cos(y pi/2) ], reached through
/// the Riemann-Liouville path and never by direct quadrature of the
/// hyper-singular kernel. The outer derivative is folded into the RL order,
/// S_y p = D*^{y+1} p / cos(y pi/2), so no finite difference is taken of an
/// extrapolated newest sample. y = 1 differentiates the RL-type positive
/// derivative analytically, using d/dt F[g] = F[g'] + g(t0)/(t - t0) for the
/// log-kernel finite part F.
inline SampledSignal szabo_operator(const SampledSignal& p, double y, const PositiveOptions& opt = {}) {
  detail::require_loss_exponent(y);
  if (y == 0.0) return derivative(p, 1);
  if (y == 2.0) return detail::negated_third(p);
  if (y == 1.0) {
    auto out = compose_with_integer(p, PositiveOrder(1.0), 1, opt);
    const auto b = detail::szabo_unit_boundary(p);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += b[i];
    return out;
  }
  auto rl = rl_deriv_general(p, FracOrder(y + 1.0));
  const double c = std::cos(y * std::numbers::pi / 2.0);
  for (double& v : rl.values) v /= c;
  return rl;
}

/// Continuous transfer function of Q_y (and of S_y, which has the same symbol).
inline std::complex<double> loss_symbol(double y, double omega, const PositiveOptions& opt = {}) {
  const std::complex<double> d1(0.0, -omega);
  if (y == 0.0) return d1;
  if (y == 2.0) return -d1 * d1 * d1;
  return d1 * positive_symbol(y, omega, opt);
}

/// Dispersion of the causal wave model itself,
///   k^2 = (omega/c0)^2 - (2 alpha0 / c0) L(omega),  L the loss-operator symbol.
/// Its imaginary part matches dispersion_k; its real part adds the dispersion
/// that causality imposes.
inline DispersionPoint model_dispersion_k(double omega, const LossMedium& m, const PositiveOptions& opt = {}) {
  m.validate();
  if (omega < 0.0) throw DomainError("model_dispersion_k: omega must be non-negative");
  const double kw = omega / m.c0;
  if (m.alpha0 == 0.0 || omega == 0.0) return {omega, kw, 0.0};
  const std::complex<double> k2 = kw * kw - (2.0 * m.alpha0 / m.c0) * loss_symbol(m.y, omega, opt);
  return detail::decaying_root(omega, k2);
}

}  // namespace fraclossy
