#pragma once

// Reference simulation setup: 1 MHz pulse in a water-like medium, 48 points
// per wavelength, CFL 0.3, 512 nodes, sensors at 25% and 75% of the domain.

#include <cmath>
#include <cstddef>

#include "fraclossy/analysis.hpp"
#include "fraclossy/loss_models.hpp"
#include "fraclossy/wave_sim.hpp"

namespace fraclossy::reference {

inline constexpr double c0 = 1500.0;
inline constexpr double center_frequency_hz = 1.0e6;
inline constexpr double bandwidth_fraction = 0.4;
inline constexpr double points_per_wavelength = 48.0;
inline constexpr double cfl = 0.3;
inline constexpr std::size_t nx = 512;
inline constexpr std::size_t n_steps = 2048;
inline constexpr double smallness = 0.01;
/// The source sits this far off the reflecting wall at x = 0, so that its
/// inverted wall image trails the direct pulse by half a period and the two
/// leave as one pulse travelling towards the sensors.
inline constexpr double source_offset_wavelengths = 0.25;
/// Envelope peak delay in units of sigma; the pulse starts below 1e-9 of its peak.
inline constexpr double delay_sigmas = 6.5;
/// The spectral band over which the smallness ratio is held: where a
/// Gaussian envelope of width bandwidth_fraction * omega_c stays above 5%.
inline constexpr double band_sigmas = 2.45;

inline double band_lo(const PulseSource& s) {
  return s.omega_c() * std::max(0.05, 1.0 - band_sigmas * s.bandwidth_fraction);
}
inline double band_hi(const PulseSource& s) { return s.omega_c() * (1.0 + band_sigmas * s.bandwidth_fraction); }

/// alpha0 such that smallness_ratio over the pulse band equals `ratio`.
inline double alpha0_for_ratio(double y, double ratio, double c, const PulseSource& s) {
  const double w = y >= 1.0 ? band_hi(s) : band_lo(s);
  return ratio / (c * std::pow(w, y - 1.0));
}

inline SimConfig config(double y, LossKind kind = LossKind::modified) {
  SimConfig cfg;
  cfg.source.center_frequency_hz = center_frequency_hz;
  cfg.source.bandwidth_fraction = bandwidth_fraction;
  cfg.source.amplitude = 1.0;
  cfg.source.delay = delay_sigmas * cfg.source.sigma();
  const double dx = c0 / (center_frequency_hz * points_per_wavelength);
  cfg.grid = {0.0, dx, nx};
  cfg.medium = {c0, alpha0_for_ratio(y, smallness, c0, cfg.source), y};
  cfg.dt = cfl * dx / c0;
  cfg.n_steps = n_steps;
  cfg.source.position = source_offset_wavelengths * c0 / center_frequency_hz;
  cfg.sensors = {0.25 * cfg.grid.length(), 0.75 * cfg.grid.length()};
  cfg.boundary = Boundary::reflective_zero;
  cfg.loss_kind = kind;
  return cfg;
}

/// Time window [start, end] holding the direct arrival at x and its wall
/// image, padded by gate_sigmas envelope widths on both sides.
struct Gate {
  double start;
  double end;
};

inline constexpr double gate_sigmas = 5.5;

inline Gate direct_gate(const SimConfig& cfg, double x) {
  const double direct = cfg.source.delay + std::abs(x - cfg.source.position) / cfg.medium.c0;
  const double image = cfg.source.delay + (x + cfg.source.position - 2.0 * cfg.grid.x0) / cfg.medium.c0;
  const double half = gate_sigmas * cfg.source.sigma();
  return {std::min(direct, image) - half, std::max(direct, image) + half};
}

/// Sensor record restricted to its direct arrival.
inline SensorRecord gated(const SimConfig& cfg, const SensorRecord& r) {
  const auto g = direct_gate(cfg, r.x);
  return {r.x, time_gate(r.signal, g.start, g.end, cfg.source.sigma())};
}

}  // namespace fraclossy::reference
