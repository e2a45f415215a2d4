#pragma once

// Positive time fractional derivative D^|eta|.
//
// The operator is the causal convolution whose transfer function has real
// part |omega|^eta (forward transform kernel e^{+i omega t}, d/dt <-> -i omega).
// For non-integer eta it equals the Caputo derivative scaled by
// 1/cos(eta pi/2):
//
//     H(omega) = (-i omega)^eta / cos(eta pi / 2)
//              = |omega|^eta (1 - i sgn(omega) tan(eta pi / 2))
//
// The imaginary part is the dispersion that causality forces on a loss whose
// real part is the power law. At odd integer orders it diverges; there the
// kernel is logarithmic and the finite part needs a reference time s:
//
//     H(omega) = (2/pi) (-1)^k (-i omega)^(2k+1) (i pi/2 - ln(|omega| s))   (omega > 0)
//
// whose real part is again |omega|^(2k+1).

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "fraclossy/errors.hpp"
#include "fraclossy/frac_core.hpp"
#include "fraclossy/quadrature.hpp"
#include "fraclossy/signal.hpp"

namespace fraclossy {

/// Order of the positive derivative.
struct PositiveOrder {
  double eta;

  constexpr explicit PositiveOrder(double e) : eta(e) {}
};

struct PositiveOptions {
  /// Reference time s of the logarithmic kernel used at odd integer orders.
  /// The finite-part constant is ln(T) with T = s e^{-gamma_E}, which makes
  /// the imaginary part of the symbol vanish at |omega| = 1/s.
  double time_scale = 1.0;
};

/// q(eta) = pi / (2 Gamma(eta+1) cos[(eta+1) pi / 2]).
inline double q_eta(double eta) {
  if (!std::isfinite(eta)) throw DomainError("q_eta: non-finite order");
  const double half = 0.5 * eta;
  if (half == std::nearbyint(half)) throw DomainError("q_eta: cos[(eta+1)pi/2] vanishes at even eta");
  const double c = std::cos((eta + 1.0) * std::numbers::pi / 2.0);
  return std::numbers::pi / (2.0 * gamma(eta + 1.0) * c);
}

/// Continuous transfer function of D^|eta| (eta >= 0) at angular frequency omega.
inline std::complex<double> positive_symbol(double eta, double omega, const PositiveOptions& opt = {}) {
  using C = std::complex<double>;
  if (omega == 0.0) return eta == 0.0 ? C(1.0) : C(0.0);
  const double w = std::abs(omega);
  const double sg = omega > 0.0 ? 1.0 : -1.0;
  const double odd = eta - 1.0;
  if (eta > 0.0 && 0.5 * odd == std::nearbyint(0.5 * odd)) {
    const int k = static_cast<int>(std::nearbyint(0.5 * odd));
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const C minus_i_w_pow = std::pow(C(0.0, -omega), eta);
    const C bracket(-std::log(w * opt.time_scale), sg * std::numbers::pi / 2.0);
    return (2.0 / std::numbers::pi) * sign * minus_i_w_pow * bracket;
  }
  const double phase = -sg * eta * std::numbers::pi / 2.0;
  return std::pow(w, eta) * std::polar(1.0, phase) / std::cos(eta * std::numbers::pi / 2.0);
}

namespace detail {

constexpr double euler_gamma = 0.57721566490153286061;

/// prefactor * int_{t0}^{t} f(tau) (t - tau)^{-nu} dtau, nu in (0,1], the
/// nu = 1 case taken as the log-kernel finite part with reference time T.
inline std::vector<double> kernel_integral(std::span<const double> f, double h, double nu, double prefactor,
                                           const PositiveOptions& opt) {
  std::vector<double> out;
  if (nu == 1.0) {
    const quadrature::LogKernelWeights w(h, opt.time_scale * std::exp(-euler_gamma), f.size());
    out = w.all(f);
  } else {
    const quadrature::PowerKernelWeights w(1.0 - nu, h, f.size());
    out = w.all(f);
  }
  for (double& v : out) v *= prefactor;
  return out;
}

/// Branch data for order eta in (2k, 2k+2): derivative order applied to the
/// signal, kernel exponent nu in (0,1], and the scalar in front of the integral.
struct PositiveBranch {
  int derivative_order;
  double nu;
  double prefactor;
};

inline PositiveBranch positive_branch(double eta, int k) {
  const double nu = eta - 2.0 * k;
  // Normalization so that the symbol's real part is exactly |omega|^eta. For
  // k = 0 this is the printed 1/q(eta) form; for k >= 1 the printed form
  // carries an extra Gamma(eta+1)/Gamma(nu+1), divided out here.
  const double correction = (k == 0) ? 1.0 : gamma(nu + 1.0) / gamma(eta + 1.0);
  if (nu <= 1.0) return {2 * k + 1, nu, correction * (-1.0 / (nu * q_eta(eta)))};
  // second branch: kernel (t - tau)^{-(nu - 1)}
  return {2 * k + 2, nu - 1.0, correction / (nu * (nu - 1.0) * q_eta(eta))};
}

/// Integrand D^{m+q} p with m the branch derivative order; q > 0 composes an
/// extra integer derivative into the same stencil.
inline std::vector<double> positive_integrand(std::span<const double> p, double h, const PositiveBranch& b, int q = 0) {
  return fd::derivative(p, h, b.derivative_order + q);
}

inline SampledSignal positive_eval(const SampledSignal& p, double eta, int k, const PositiveOptions& opt, int q = 0) {
  require_length(p, 5);
  const auto b = positive_branch(eta, k);
  const auto f = positive_integrand(p.values, p.dt(), b, q);
  return p.with_values(kernel_integral(f, p.dt(), b.nu, b.prefactor, opt));
}

}  // namespace detail

/// Caputo-type positive derivative D^|eta| p for eta in [0, 2].
/// eta = 0 returns p, eta = 2 returns -D^2 p.
inline SampledSignal pos_frac_caputo(const SampledSignal& p, PositiveOrder order, const PositiveOptions& opt = {}) {
  const double eta = order.eta;
  if (!(eta >= 0.0 && eta <= 2.0)) throw DomainError("pos_frac_caputo: order must lie in [0, 2]");
  p.validate();
  if (eta == 0.0) return p;
  if (eta == 2.0) {
    auto d2 = derivative(p, 2);
    for (double& v : d2.values) v = -v;
    return d2;
  }
  return detail::positive_eval(p, eta, 0, opt);
}

/// RL-type positive derivative D*^|eta| p for eta in (0, 2): the Caputo-type
/// value plus the boundary series produced by integrating by parts,
///
///   D*^|eta| p = D^|eta| p + sum_{k<m} D^k p(t0) (t - t0)^{k - eta} / (Gamma(k+1-eta) cos(eta pi/2)),
///
/// m = ceil(eta). The k = 0 coefficient is written as 2 Gamma(eta) sin(eta pi/2)/pi,
/// which stays finite at eta = 1 (where it gives 2/(pi t)). The boundary terms
/// are singular at t0 and contribute zero to the first sample.
inline SampledSignal pos_frac_rl(const SampledSignal& p, PositiveOrder order, const PositiveOptions& opt = {}) {
  const double eta = order.eta;
  if (!(eta > 0.0 && eta < 2.0)) throw DomainError("pos_frac_rl: order must lie in (0, 2)");
  auto out = pos_frac_caputo(p, order, opt);
  const int m = static_cast<int>(std::ceil(eta));
  const auto d0 = initial_derivatives(p, m);
  std::vector<double> coef(static_cast<std::size_t>(m));
  coef[0] = 2.0 * gamma(eta) * std::sin(eta * std::numbers::pi / 2.0) / std::numbers::pi;
  if (m > 1) coef[1] = 1.0 / (gamma(2.0 - eta) * std::cos(eta * std::numbers::pi / 2.0));
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double tau = p.grid.time(i) - p.grid.t0;
    for (int k = 0; k < m; ++k)
      out.values[i] += d0[static_cast<std::size_t>(k)] * coef[static_cast<std::size_t>(k)] * std::pow(tau, k - eta);
  }
  return out;
}

/// Generalized positive derivative for 2k < eta < 2k+2. k = 0 is exactly
/// pos_frac_caputo; eta = 2k+1 takes the first (logarithmic-kernel) branch.
inline SampledSignal pos_frac_general(const SampledSignal& u, double eta, int k, const PositiveOptions& opt = {}) {
  if (k < 0) throw DomainError("pos_frac_general: k must be non-negative");
  if (!(eta > 2.0 * k && eta < 2.0 * k + 2.0))
    throw DomainError("pos_frac_general: order must lie in (2k, 2k+2)");
  if (k == 0) return pos_frac_caputo(u, PositiveOrder(eta), opt);
  u.validate();
  return detail::positive_eval(u, eta, k, opt);
}

/// D^|eta| (D^q p): integer derivative first, then the positive derivative.
/// Symbol (-i omega)^q H_eta(omega).
inline SampledSignal compose_with_integer(const SampledSignal& p, PositiveOrder eta, int q,
                                          const PositiveOptions& opt = {}) {
  if (q < 1) throw DomainError("compose_with_integer: q must be a positive integer");
  if (!(eta.eta >= 0.0 && eta.eta <= 2.0)) throw DomainError("compose_with_integer: order must lie in [0, 2]");
  p.validate();
  if (eta.eta == 0.0) return derivative(p, q);
  if (eta.eta == 2.0) {
    auto d = derivative(p, q + 2);
    for (double& v : d.values) v = -v;
    return d;
  }
  return detail::positive_eval(p, eta.eta, 0, opt, q);
}

}  // namespace fraclossy
