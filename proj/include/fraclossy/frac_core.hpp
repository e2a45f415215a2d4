#pragma once

// Fractional integral and Riemann-Liouville / Caputo derivatives on uniformly
// sampled signals. The lower terminal is always grid.t0.
//
// Two independent discretizations are provided on purpose:
//   Caputo     product integration (linear interpolant, exact singular kernel)
//              applied to finite-difference D^m psi
//   RL         shifted Grunwald-Letnikov series on the raw samples
// so that identities relating the two are not circular.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fraclossy/errors.hpp"
#include "fraclossy/quadrature.hpp"
#include "fraclossy/signal.hpp"

namespace fraclossy {

/// Gamma function. Throws DomainError at the poles 0, -1, -2, ...
inline double gamma(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma: non-finite argument");
  if (x <= 0.0 && x == std::nearbyint(x)) throw DomainError("gamma: pole at x = " + std::to_string(x));
  return std::tgamma(x);
}

/// Strictly positive fractional order (wraps a double so orders and times do not mix).
struct FracOrder {
  double value;

  constexpr explicit FracOrder(double v) : value(v) {}
  bool is_integer() const noexcept { return value == std::nearbyint(value); }
  int ceil() const noexcept { return static_cast<int>(std::ceil(value)); }
};

/// theta_mu(t) = |t|^mu / Gamma(mu + 1).
inline double theta_kernel(double mu, double t) {
  if (mu + 1.0 <= 0.0 && mu + 1.0 == std::nearbyint(mu + 1.0))
    throw DomainError("theta_kernel: Gamma(mu+1) has a pole");
  if (t == 0.0) {
    if (mu < 0.0) throw DomainError("theta_kernel: singular at t = 0 for negative mu");
    return mu == 0.0 ? 1.0 : 0.0;
  }
  return std::pow(std::abs(t), mu) / gamma(mu + 1.0);
}

namespace detail {

inline void require_derivative_order(const FracOrder& mu) {
  if (!(mu.value > 0.0) || !std::isfinite(mu.value)) throw DomainError("fractional order must be positive");
  if (mu.is_integer()) throw DomainError("integer order: use an ordinary derivative");
}

inline void require_two_branch(const FracOrder& mu) {
  require_derivative_order(mu);
  if (mu.value >= 2.0) throw DomainError("order must lie in (0,1) or (1,2)");
}

inline void require_length(const SampledSignal& s, std::size_t n_min) {
  s.validate();
  if (s.size() < n_min) throw DomainError("signal too short: need at least " + std::to_string(n_min) + " samples");
}

/// Caputo derivative for any positive non-integer order.
inline SampledSignal caputo_any(const SampledSignal& psi, const FracOrder& mu) {
  require_derivative_order(mu);
  require_length(psi, 5);
  const int m = mu.ceil();
  const auto dm = fd::derivative(psi.values, psi.dt(), m);
  const double beta = static_cast<double>(m) - mu.value;
  const quadrature::PowerKernelWeights w(beta, psi.dt(), psi.size());
  auto out = w.all(dm);
  const double g = gamma(beta);
  for (double& v : out) v /= g;
  return psi.with_values(std::move(out));
}

/// RL derivative for any positive non-integer order via shifted Grunwald-Letnikov.
inline SampledSignal rl_any(const SampledSignal& psi, const FracOrder& mu) {
  require_derivative_order(mu);
  require_length(psi, 5);
  const quadrature::ShiftedGrunwald w(mu.value, psi.dt(), psi.size());
  return psi.with_values(w.all(psi.values));
}

}  // namespace detail

/// Riemann-Liouville fractional integral J^q psi with lower limit grid.t0.
inline SampledSignal frac_integral(const SampledSignal& psi, FracOrder q) {
  if (!(q.value > 0.0) || !std::isfinite(q.value)) throw DomainError("frac_integral: order must be positive");
  psi.validate();
  const quadrature::PowerKernelWeights w(q.value, psi.dt(), psi.size());
  auto out = w.all(psi.values);
  const double g = gamma(q.value);
  for (double& v : out) v /= g;
  return psi.with_values(std::move(out));
}

/// Caputo derivative D^mu psi = J^{m-mu}[D^m psi], mu in (0,1) or (1,2).
inline SampledSignal caputo_deriv(const SampledSignal& psi, FracOrder mu) {
  detail::require_two_branch(mu);
  return detail::caputo_any(psi, mu);
}

/// Riemann-Liouville derivative D*^mu psi, mu in (0,1) or (1,2), via the
/// Grunwald-Letnikov series (no product-integration code is shared with
/// caputo_deriv).
inline SampledSignal rl_deriv(const SampledSignal& psi, FracOrder mu) {
  detail::require_two_branch(mu);
  return detail::rl_any(psi, mu);
}

/// Riemann-Liouville derivative of any positive non-integer order (the general
/// m-branch form, m = ceil(mu)), same Grunwald-Letnikov scheme as rl_deriv.
inline SampledSignal rl_deriv_general(const SampledSignal& psi, FracOrder mu) { return detail::rl_any(psi, mu); }

/// Caputo derivative rebuilt from the RL path:
///   D*^mu psi - sum_{k<m} D^k psi(t0) theta_{k-mu}(t - t0).
/// The initial derivatives are one-sided finite differences. The value at t0
/// itself, where the correction terms are singular, is reported as zero.
inline SampledSignal caputo_via_series(const SampledSignal& psi, FracOrder mu) {
  auto rl = rl_deriv(psi, mu);
  const int m = mu.ceil();
  const auto d0 = initial_derivatives(psi, m);
  auto& v = rl.values;
  v[0] = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double tau = psi.grid.time(i) - psi.grid.t0;
    for (int k = 0; k < m; ++k) v[i] -= d0[static_cast<std::size_t>(k)] * theta_kernel(k - mu.value, tau);
  }
  return rl;
}

}  // namespace fraclossy
