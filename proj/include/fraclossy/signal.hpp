#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fraclossy/errors.hpp"

namespace fraclossy {

/// Uniform time grid; sample i sits at t0 + i*dt.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t n = 2;

  double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
  double t_end() const noexcept { return time(n - 1); }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("TimeGrid: dt must be positive and finite");
    if (n < 2) throw DomainError("TimeGrid: need at least 2 samples");
    if (!std::isfinite(t0)) throw DomainError("TimeGrid: t0 must be finite");
  }

  /// Grid of n samples covering [t0, t_end].
  static TimeGrid spanning(double t0, double t_end, std::size_t n) {
    if (n < 2) throw DomainError("TimeGrid: need at least 2 samples");
    TimeGrid g{t0, (t_end - t0) / static_cast<double>(n - 1), n};
    g.validate();
    return g;
  }
};

/// Real samples on a uniform grid. Input and output of every fractional operator.
struct SampledSignal {
  TimeGrid grid;
  std::vector<double> values;

  SampledSignal() = default;
  SampledSignal(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) { validate(); }

  template <typename F>
  static SampledSignal from_function(const TimeGrid& g, F&& f) {
    g.validate();
    std::vector<double> v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.time(i));
    return SampledSignal(g, std::move(v));
  }

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  double dt() const noexcept { return grid.dt; }

  void validate() const {
    grid.validate();
    if (values.size() != grid.n) throw DomainError("SampledSignal: value count does not match grid");
    for (double v : values)
      if (!std::isfinite(v)) throw NumericalError("SampledSignal: non-finite sample");
  }

  /// Same grid, new values.
  SampledSignal with_values(std::vector<double> v) const { return SampledSignal(grid, std::move(v)); }
};

// Finite differences. Second-order central in the interior, second-order
// one-sided at both ends. Stencils are written in difference form so that
// constants map to exactly zero.
namespace fd {

inline std::vector<double> first(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 3) throw DomainError("first derivative needs at least 3 samples");
  std::vector<double> d(n);
  const double inv2h = 1.0 / (2.0 * h);
  d[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) * inv2h;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2h;
  d[n - 1] = (4.0 * (f[n - 1] - f[n - 2]) - (f[n - 1] - f[n - 3])) * inv2h;
  return d;
}

inline std::vector<double> second(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 4) throw DomainError("second derivative needs at least 4 samples");
  std::vector<double> d(n);
  const double invh2 = 1.0 / (h * h);
  // 2 f0 - 5 f1 + 4 f2 - f3
  d[0] = (-5.0 * (f[1] - f[0]) + 4.0 * (f[2] - f[0]) - (f[3] - f[0])) * invh2;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = ((f[i + 1] - f[i]) - (f[i] - f[i - 1])) * invh2;
  d[n - 1] = (-5.0 * (f[n - 2] - f[n - 1]) + 4.0 * (f[n - 3] - f[n - 1]) - (f[n - 4] - f[n - 1])) * invh2;
  return d;
}

/// Fornberg weights for the `order`-th derivative at offset 0 from the given
/// integer offsets (unit spacing).
inline std::vector<double> stencil_weights(std::span<const int> offsets, int order) {
  const std::size_t np = offsets.size();
  const auto m = static_cast<std::size_t>(order);
  std::vector<std::vector<double>> c(np, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < np; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = offsets[i] - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(np);
  for (std::size_t i = 0; i < np; ++i) w[i] = c[i][m];
  return w;
}

/// Derivative of integer order m >= 0, each order from a single stencil:
/// centred with 2 ceil(m/2) + 1 points in the interior, m + 2 points shifted
/// inward near the ends. Both are second-order accurate. Applying lower-order
/// stencils repeatedly would instead amplify the one-sided end errors by 1/h
/// per application.
inline std::vector<double> derivative(std::span<const double> f, double h, int order) {
  if (order < 0) throw DomainError("negative derivative order");
  if (order == 0) return std::vector<double>(f.begin(), f.end());
  if (order == 1) return first(f, h);
  if (order == 2) return second(f, h);
  const std::size_t n = f.size();
  const auto edge_width = static_cast<std::size_t>(order) + 2;
  const std::size_t half = (static_cast<std::size_t>(order) + 1) / 2;
  if (n < edge_width) throw DomainError("derivative: too few samples for the requested order");
  const double scale = std::pow(h, -order);
  auto weights_for = [&](std::size_t start, std::size_t width, std::size_t i) {
    std::vector<int> off(width);
    for (std::size_t j = 0; j < width; ++j) off[j] = static_cast<int>(start + j) - static_cast<int>(i);
    return stencil_weights(off, order);
  };
  std::vector<double> d(n);
  std::vector<double> central;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t start, width;
    std::vector<double> w;
    if (i >= half && i + half < n) {
      start = i - half;
      width = 2 * half + 1;
      if (central.empty()) central = weights_for(start, width, i);
      w = central;
    } else {
      width = edge_width;
      start = i < half ? 0 : n - width;
      w = weights_for(start, width, i);
    }
    // difference form: constants map to exactly zero
    double acc = 0.0;
    for (std::size_t j = 0; j < width; ++j) acc += w[j] * (f[start + j] - f[i]);
    d[i] = acc * scale;
  }
  return d;
}

}  // namespace fd

/// Integer-order time derivative of a sampled signal.
inline SampledSignal derivative(const SampledSignal& s, int order) {
  return s.with_values(fd::derivative(s.values, s.dt(), order));
}

/// One-sided estimates of D^k psi(t0), k = 0..m-1, from the leading samples.
inline std::vector<double> initial_derivatives(const SampledSignal& s, int m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) out.push_back(fd::derivative(s.values, s.dt(), k)[0]);
  return out;
}

}  // namespace fraclossy
