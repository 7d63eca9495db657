// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace msbp::kernels {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

Isa detect() {
  if (const char* env = std::getenv("MSBP_SIMD"); env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands must have equal length");
}

}  // namespace

bool avx2_supported() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

namespace scalar {

void add_gaussian(std::span<const double> x, double mu, double tau, double w, std::span<double> out) {
  check_sizes(x.size(), out.size());
  const double c = w * kInvSqrt2Pi * std::sqrt(tau);
  const double h = -0.5 * tau;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mu;
    out[i] += c * std::exp(h * d * d);
  }
}

void gaussian_logpdf(std::span<const double> x, double mu, double tau, std::span<double> out) {
  check_sizes(x.size(), out.size());
  const double c = 0.5 * std::log(tau) - kHalfLog2Pi;
  const double h = -0.5 * tau;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - mu;
    out[i] = c + h * d * d;
  }
}

double trapezoid_abs_diff(std::span<const double> grid, std::span<const double> f, std::span<const double> g) {
  check_sizes(grid.size(), f.size());
  check_sizes(grid.size(), g.size());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    s += 0.5 * (grid[i + 1] - grid[i]) * (std::fabs(f[i] - g[i]) + std::fabs(f[i + 1] - g[i + 1]));
  return s;
}

}  // namespace scalar

void add_gaussian(std::span<const double> x, double mu, double tau, double w, std::span<double> out) {
  if (active_isa() == Isa::Avx2) return avx2::add_gaussian(x, mu, tau, w, out);
  scalar::add_gaussian(x, mu, tau, w, out);
}

void gaussian_logpdf(std::span<const double> x, double mu, double tau, std::span<double> out) {
  if (active_isa() == Isa::Avx2) return avx2::gaussian_logpdf(x, mu, tau, out);
  scalar::gaussian_logpdf(x, mu, tau, out);
}

double trapezoid_abs_diff(std::span<const double> grid, std::span<const double> f, std::span<const double> g) {
  if (active_isa() == Isa::Avx2) return avx2::trapezoid_abs_diff(grid, f, g);
  return scalar::trapezoid_abs_diff(grid, f, g);
}

}  // namespace msbp::kernels
