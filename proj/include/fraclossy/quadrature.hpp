#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fraclossy/errors.hpp"

namespace fraclossy::quadrature {

/*
 * Product integration of weakly singular convolutions on a uniform grid.
 *
 *                t_n
 *   I_n[f] =  integral  f(tau) (t_n - tau)^(beta - 1) dtau ,   beta > 0
 *                t_0
 *
 * f is replaced by its piecewise-linear interpolant and the kernel is
 * integrated exactly against it:
 *
 *   I_n = h^beta / (beta (beta + 1)) * ( a_n f_0 + sum_{j=1..n} c_{n-j} f_j )
 *
 *   c_0 = 1
 *   c_k = (k+1)^(beta+1) - 2 k^(beta+1) + (k-1)^(beta+1)     k >= 1
 *   a_n = (n-1)^(beta+1) - (n-1-beta) n^beta
 *
 * The differences are evaluated through expm1/log1p so that large lags keep
 * their relative accuracy.
 */
class PowerKernelWeights {
 public:
  PowerKernelWeights(double beta, double h, std::size_t max_n) : beta_(beta), h_(h) {
    if (!(beta > 0.0)) throw DomainError("power kernel exponent must be positive");
    if (!(h > 0.0)) throw DomainError("step must be positive");
    scale_ = std::pow(h, beta) / (beta * (beta + 1.0));
    lag_.resize(max_n + 1);
    start_.resize(max_n + 1);
    const double b1 = beta + 1.0;
    lag_[0] = 1.0;
    start_[0] = 0.0;
    for (std::size_t k = 1; k <= max_n; ++k) {
      const double kd = static_cast<double>(k);
      const double lead = std::pow(kd, b1);
      lag_[k] = lead * (std::expm1(b1 * std::log1p(1.0 / kd)) + std::expm1(b1 * std::log1p(-1.0 / kd)));
      start_[k] = lead * (std::expm1(b1 * std::log1p(-1.0 / kd)) + b1 / kd);
    }
  }

  double beta() const noexcept { return beta_; }
  double step() const noexcept { return h_; }
  std::size_t capacity() const noexcept { return lag_.size() - 1; }

  /// I_n for n = f.size() - 1, using samples j >= first only when first > 0
  /// (history truncation; the start correction is then dropped).
  double at_last(std::span<const double> f, std::size_t first = 0) const {
    const std::size_t n = f.size() - 1;
    if (n == 0) return 0.0;
    check(n);
    double acc = 0.0;
    std::size_t j0 = 1;
    if (first == 0) {
      acc = start_[n] * f[0];
    } else {
      j0 = first;
    }
    const double* lag = lag_.data();
    for (std::size_t j = j0; j <= n; ++j) acc += lag[n - j] * f[j];
    return scale_ * acc;
  }

  /// I_n at every grid point.
  std::vector<double> all(std::span<const double> f) const {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t n = 1; n < f.size(); ++n) out[n] = at_last(f.first(n + 1));
    return out;
  }

 private:
  void check(std::size_t n) const {
    if (n > capacity()) throw DomainError("quadrature weights built for a shorter history");
  }

  double beta_;
  double h_;
  double scale_;
  std::vector<double> lag_;
  std::vector<double> start_;
};

/*
 * Finite-part integral with the logarithmic (Cauchy-type) kernel,
 *
 *   F_n[f] = int_{t0}^{t_n} (f(tau) - f(t_n)) / (t_n - tau) dtau + f(t_n) ln((t_n - t0) / T),
 *
 * again exact for the piecewise-linear interpolant. T is the reference time
 * that fixes the otherwise arbitrary additive constant of the finite part.
 *
 * Lag weights (l = n - i):
 *   w_0 = ln(h/T) - 1
 *   w_1 = B(2) + 1
 *   w_l = A(l) + B(l+1)           2 <= l <= n-1
 *   f_0 : A(n)  (n >= 2),  1 (n = 1)
 * with A(a) = 1 - (a-1) ln(a/(a-1)),  B(a) = a ln(a/(a-1)) - 1.
 */
class LogKernelWeights {
 public:
  LogKernelWeights(double h, double reference_time, std::size_t max_n) : h_(h) {
    if (!(h > 0.0)) throw DomainError("step must be positive");
    if (!(reference_time > 0.0)) throw DomainError("log-kernel reference time must be positive");
    lag_.assign(max_n + 2, 0.0);
    start_.assign(max_n + 2, 0.0);
    lag_[0] = std::log(h / reference_time) - 1.0;
    if (max_n >= 1) lag_[1] = B(2) + 1.0;
    for (std::size_t l = 2; l <= max_n; ++l) lag_[l] = A(l) + B(l + 1);
    if (max_n >= 1) start_[1] = 1.0;
    for (std::size_t n = 2; n <= max_n; ++n) start_[n] = A(n);
  }

  std::size_t capacity() const noexcept { return start_.size() - 2; }

  double at_last(std::span<const double> f, std::size_t first = 0) const {
    const std::size_t n = f.size() - 1;
    if (n == 0) return 0.0;
    if (n > capacity()) throw DomainError("quadrature weights built for a shorter history");
    double acc = f[n] * lag_[0];
    if (n == 1) return acc + f[0] * start_[1];
    acc += f[n - 1] * lag_[1];
    std::size_t i0 = 1;
    if (first == 0) {
      acc += f[0] * start_[n];
    } else {
      i0 = first;
    }
    const double* lag = lag_.data();
    for (std::size_t i = i0; i + 1 < n; ++i) acc += lag[n - i] * f[i];
    return acc;
  }

  std::vector<double> all(std::span<const double> f) const {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t n = 1; n < f.size(); ++n) out[n] = at_last(f.first(n + 1));
    return out;
  }

 private:
  static double L(std::size_t a) { return std::log1p(1.0 / static_cast<double>(a - 1)); }
  static double A(std::size_t a) { return 1.0 - static_cast<double>(a - 1) * L(a); }
  static double B(std::size_t a) { return static_cast<double>(a) * L(a) - 1.0; }

  double h_;
  std::vector<double> lag_;
  std::vector<double> start_;
};

/*
 * Shifted Grunwald-Letnikov scheme for the Riemann-Liouville derivative.
 *
 *   raw_n = h^-mu sum_{j=0..n} g_j f_{n-j},   g_0 = 1,  g_j = g_{j-1} (1 - (mu+1)/j)
 *
 * raw_n is a second-order estimate at the shifted point t_n - mu h/2, so it is
 * interpolated back onto the grid (extrapolated at the newest sample). Two
 * starting weights on f_0 and f_1 then make the grid value exact for 1 and t,
 * which removes the O(1/n) error caused by the jump at the lower terminal.
 */
class ShiftedGrunwald {
 public:
  ShiftedGrunwald(double mu, double h, std::size_t max_n) : mu_(mu), h_(h), scale_(std::pow(h, -mu)) {
    if (!(mu > 0.0)) throw DomainError("Grunwald-Letnikov order must be positive");
    const std::size_t len = max_n + 2;
    g_.resize(len);
    g_[0] = 1.0;
    for (std::size_t j = 1; j < len; ++j) g_[j] = g_[j - 1] * (1.0 - (mu + 1.0) / static_cast<double>(j));

    // raw responses to f = 1 and f = t
    std::vector<double> r0(len), r1(len);
    // sum_i g_{n-i} i h = h (n S0_n - S1_n),  S0 = sum g_k,  S1 = sum k g_k
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
      const double nd = static_cast<double>(n);
      s0 += g_[n];
      s1 += nd * g_[n];
      r0[n] = scale_ * s0;
      r1[n] = scale_ * h * (nd * s0 - s1);
    }
    const double e0 = 1.0 / std::tgamma(1.0 - mu);
    const double e1 = 1.0 / std::tgamma(2.0 - mu);
    const double s = 0.5 * mu;
    a_int_.assign(max_n + 1, 0.0);
    b_int_.assign(max_n + 1, 0.0);
    a_last_.assign(max_n + 1, 0.0);
    b_last_.assign(max_n + 1, 0.0);
    for (std::size_t n = 1; n <= max_n; ++n) {
      const double t = static_cast<double>(n) * h;
      const double ex0 = e0 * std::pow(t, -mu);
      const double ex1 = e1 * std::pow(t, 1.0 - mu);
      const double si0 = (1.0 - s) * r0[n] + s * r0[n + 1];
      const double si1 = (1.0 - s) * r1[n] + s * r1[n + 1];
      const double sl0 = (1.0 + s) * r0[n] - s * r0[n - 1];
      const double sl1 = (1.0 + s) * r1[n] - s * r1[n - 1];
      b_int_[n] = (ex1 - si1) / h;
      a_int_[n] = (ex0 - si0) - b_int_[n];
      b_last_[n] = (ex1 - sl1) / h;
      a_last_[n] = (ex0 - sl0) - b_last_[n];
    }
  }

  double order() const noexcept { return mu_; }
  std::size_t capacity() const noexcept { return a_int_.size() - 1; }

  /// Raw GL sum at n = f.size() - 1 (samples before `first` dropped).
  double raw_at_last(std::span<const double> f, std::size_t first = 0) const {
    const std::size_t n = f.size() - 1;
    if (n + 1 >= g_.size()) throw DomainError("quadrature weights built for a shorter history");
    double acc = 0.0;
    const double* g = g_.data();
    for (std::size_t i = first; i <= n; ++i) acc += g[n - i] * f[i];
    return scale_ * acc;
  }

  /// Grid value at index n given raw sums raw[n-1], raw[n], raw[n+1]
  /// (last == true means n is the newest sample and raw[n+1] is absent).
  double grid_value(std::span<const double> raw, std::size_t n, bool last, double f0, double f1) const {
    const double s = 0.5 * mu_;
    if (n == 0) return last ? raw[0] : (1.0 - s) * raw[0] + s * raw[1];
    if (last) return (1.0 + s) * raw[n] - s * raw[n - 1] + a_last_[n] * f0 + b_last_[n] * f1;
    return (1.0 - s) * raw[n] + s * raw[n + 1] + a_int_[n] * f0 + b_int_[n] * f1;
  }

  std::vector<double> all(std::span<const double> f) const {
    const std::size_t len = f.size();
    std::vector<double> raw(len);
    for (std::size_t n = 0; n < len; ++n) raw[n] = raw_at_last(f.first(n + 1));
    const double f1 = len > 1 ? f[1] : 0.0;
    std::vector<double> out(len);
    for (std::size_t n = 0; n < len; ++n) out[n] = grid_value(raw, n, n + 1 == len, f[0], f1);
    return out;
  }

 private:
  double mu_;
  double h_;
  double scale_;
  std::vector<double> g_;
  std::vector<double> a_int_, b_int_, a_last_, b_last_;
};

}  // namespace fraclossy::quadrature
