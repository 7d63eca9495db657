// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma; only reached through runtime dispatch.

#include <immintrin.h>

#include <cmath>
#include <stdexcept>

#include "msbp/kernels.hpp"

namespace msbp::kernels::avx2 {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

// exp(x) for x <= 0: Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2, and a
// degree-12 Taylor polynomial. Inputs below -708 flush to zero.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d lower = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  static constexpr double c[13] = {1.0,
                                   1.0,
                                   1.0 / 2.0,
                                   1.0 / 6.0,
                                   1.0 / 24.0,
                                   1.0 / 120.0,
                                   1.0 / 720.0,
                                   1.0 / 5040.0,
                                   1.0 / 40320.0,
                                   1.0 / 362880.0,
                                   1.0 / 3628800.0,
                                   1.0 / 39916800.0,
                                   1.0 / 479001600.0};
  __m256d p = _mm256_set1_pd(c[12]);
  for (int k = 11; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[k]));

  // 2^n through the exponent field; n >= -1022 after the clamp.
  const __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i e = _mm256_cvtepi32_epi64(ni);
  e = _mm256_add_epi64(e, _mm256_set1_epi64x(1023));
  e = _mm256_slli_epi64(e, 52);
  const __m256d scale = _mm256_castsi256_pd(e);
  return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("kernel operands must have equal length");
}

}  // namespace

void add_gaussian(std::span<const double> x, double mu, double tau, double w, std::span<double> out) {
  check_sizes(x.size(), out.size());
  const double cs = w * kInvSqrt2Pi * std::sqrt(tau);
  const double hs = -0.5 * tau;
  const __m256d c = _mm256_set1_pd(cs);
  const __m256d h = _mm256_set1_pd(hs);
  const __m256d m = _mm256_set1_pd(mu);
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), m);
    const __m256d arg = _mm256_mul_pd(h, _mm256_mul_pd(d, d));
    const __m256d o = _mm256_loadu_pd(out.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_fmadd_pd(c, exp_nonpositive(arg), o));
  }
  for (; i < x.size(); ++i) {
    const double d = x[i] - mu;
    out[i] += cs * std::exp(hs * d * d);
  }
}

void gaussian_logpdf(std::span<const double> x, double mu, double tau, std::span<double> out) {
  check_sizes(x.size(), out.size());
  const double cs = 0.5 * std::log(tau) - kHalfLog2Pi;
  const double hs = -0.5 * tau;
  const __m256d c = _mm256_set1_pd(cs);
  const __m256d h = _mm256_set1_pd(hs);
  const __m256d m = _mm256_set1_pd(mu);
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), m);
    _mm256_storeu_pd(out.data() + i, _mm256_fmadd_pd(h, _mm256_mul_pd(d, d), c));
  }
  for (; i < x.size(); ++i) {
    const double d = x[i] - mu;
    out[i] = cs + hs * d * d;
  }
}

double trapezoid_abs_diff(std::span<const double> grid, std::span<const double> f, std::span<const double> g) {
  check_sizes(grid.size(), f.size());
  check_sizes(grid.size(), g.size());
  if (grid.size() < 2) return 0.0;
  const std::size_t n = grid.size() - 1;
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(grid.data() + i);
    const __m256d x1 = _mm256_loadu_pd(grid.data() + i + 1);
    const __m256d d0 = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(f.data() + i), _mm256_loadu_pd(g.data() + i)));
    const __m256d d1 =
        _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(f.data() + i + 1), _mm256_loadu_pd(g.data() + i + 1)));
    acc = _mm256_fmadd_pd(_mm256_sub_pd(x1, x0), _mm256_add_pd(d0, d1), acc);
  }
  double s = 0.5 * hsum(acc);
  for (; i < n; ++i)
    s += 0.5 * (grid[i + 1] - grid[i]) * (std::fabs(f[i] - g[i]) + std::fabs(f[i + 1] - g[i + 1]));
  return s;
}

}  // namespace msbp::kernels::avx2
