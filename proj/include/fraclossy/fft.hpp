#pragma once

// Thin RAII wrapper over FFTW for real signals.
// Convention: X(omega_k) = sum_j x_j e^{+i omega_k t_j}, so d/dt <-> -i omega.
// FFTW's forward transform uses e^{-i...}; for real input the two differ by
// complex conjugation.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "fraclossy/errors.hpp"

namespace fraclossy::fft {

namespace detail {
// Planning is not thread-safe in FFTW; execution on distinct plans is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw NumericalError("fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

struct Plan {
  explicit Plan(fftw_plan p) : plan(p) {
    if (!plan) throw NumericalError("fftw plan creation failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  fftw_plan plan;
};
}  // namespace detail

/// Non-negative frequency half of the transform: n/2 + 1 bins.
inline std::vector<std::complex<double>> forward(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("fft: need at least 2 samples");
  const std::size_t nc = n / 2 + 1;
  detail::FftwBuffer in(sizeof(double) * n);
  detail::FftwBuffer out(sizeof(fftw_complex) * nc);
  auto* pin = static_cast<double*>(in.ptr);
  auto* pout = static_cast<fftw_complex*>(out.ptr);
  fftw_plan raw;
  {
    std::lock_guard lock(detail::planner_mutex());
    raw = fftw_plan_dft_r2c_1d(static_cast<int>(n), pin, pout, FFTW_ESTIMATE);
  }
  detail::Plan plan(raw);
  for (std::size_t i = 0; i < n; ++i) pin[i] = x[i];
  fftw_execute(plan.plan);
  std::vector<std::complex<double>> X(nc);
  for (std::size_t k = 0; k < nc; ++k) X[k] = {pout[k][0], -pout[k][1]};
  return X;
}

/// Inverse of forward(): real signal of length n from its n/2 + 1 bins.
inline std::vector<double> inverse(std::span<const std::complex<double>> X, std::size_t n) {
  const std::size_t nc = n / 2 + 1;
  if (X.size() != nc) throw DomainError("fft::inverse: bin count does not match length");
  detail::FftwBuffer in(sizeof(fftw_complex) * nc);
  detail::FftwBuffer out(sizeof(double) * n);
  auto* pin = static_cast<fftw_complex*>(in.ptr);
  auto* pout = static_cast<double*>(out.ptr);
  fftw_plan raw;
  {
    std::lock_guard lock(detail::planner_mutex());
    raw = fftw_plan_dft_c2r_1d(static_cast<int>(n), pin, pout, FFTW_ESTIMATE);
  }
  detail::Plan plan(raw);
  for (std::size_t k = 0; k < nc; ++k) {
    pin[k][0] = X[k].real();
    pin[k][1] = -X[k].imag();
  }
  fftw_execute(plan.plan);
  std::vector<double> x(n);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = pout[i] * inv;
  return x;
}

}  // namespace fraclossy::fft
