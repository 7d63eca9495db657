// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_STATS_HPP
#define MSBP_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "msbp/random.hpp"

namespace msbp {

/// Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Sum and sum of squares, merged in a fixed order for reproducibility.
struct MomentAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void merge(const MomentAccumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double variance() const;
  Estimate estimate() const;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

/// sup_x |F_n(x) - cdf(x)|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_two_sample_statistic(std::vector<double> x, std::vector<double> y);
/// Asymptotic p-value of a two-sample statistic for sizes n and m.
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);
/// Asymptotic critical value of the two-sample statistic at level alpha.
double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m);

/// Bivariate two-sample statistic: sup over pooled points of the absolute
/// difference between the lower-left-orthant empirical CDFs.
double ecdf2_two_sample_statistic(std::span<const double> x1, std::span<const double> y1,
                                  std::span<const double> x2, std::span<const double> y2);

struct PermutationTest {
  double statistic;
  double p_value;
};

/// Permutation p-value of ecdf2_two_sample_statistic.
PermutationTest ecdf2_permutation_test(std::span<const double> x1, std::span<const double> y1,
                                       std::span<const double> x2, std::span<const double> y2,
                                       int permutations, Rng& rng);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Batch-means estimate of the correlation and its standard error.
Estimate correlation_estimate(std::span<const double> x, std::span<const double> y, std::size_t batches = 100);

}  // namespace msbp

#endif  // MSBP_STATS_HPP
