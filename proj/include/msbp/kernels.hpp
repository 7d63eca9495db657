// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_KERNELS_HPP
#define MSBP_KERNELS_HPP

#include <span>

namespace msbp::kernels {

enum class Isa { Scalar, Avx2 };

/// Instruction set used by the dispatching entry points. Chosen once from
/// CPU support; MSBP_SIMD=scalar forces the reference path.
Isa active_isa();
/// Overrides the dispatch choice (tests and benchmarks). Requesting Avx2 on a
/// CPU without AVX2/FMA falls back to Scalar.
void set_isa(Isa isa);
bool avx2_supported();
const char* isa_name(Isa isa);

/// out[i] += w * N(x[i] | mu, 1 / tau)
void add_gaussian(std::span<const double> x, double mu, double tau, double w, std::span<double> out);
/// out[i] = log N(x[i] | mu, 1 / tau)
void gaussian_logpdf(std::span<const double> x, double mu, double tau, std::span<double> out);
/// Trapezoid integral of |f - g| over the (possibly nonuniform) grid.
double trapezoid_abs_diff(std::span<const double> grid, std::span<const double> f, std::span<const double> g);

namespace scalar {
void add_gaussian(std::span<const double> x, double mu, double tau, double w, std::span<double> out);
void gaussian_logpdf(std::span<const double> x, double mu, double tau, std::span<double> out);
double trapezoid_abs_diff(std::span<const double> grid, std::span<const double> f, std::span<const double> g);
}  // namespace scalar

namespace avx2 {
void add_gaussian(std::span<const double> x, double mu, double tau, double w, std::span<double> out);
void gaussian_logpdf(std::span<const double> x, double mu, double tau, std::span<double> out);
double trapezoid_abs_diff(std::span<const double> grid, std::span<const double> f, std::span<const double> g);
}  // namespace avx2

}  // namespace msbp::kernels

#endif  // MSBP_KERNELS_HPP
