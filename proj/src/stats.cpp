// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msbp {

double MomentAccumulator::variance() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double m = sum / n;
  return std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
}

Estimate MomentAccumulator::estimate() const {
  if (count == 0) return {};
  return {mean(), std::sqrt(variance() / static_cast<double>(count))};
}

double kolmogorov_sf(double lambda) {
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    s += term;
    if (std::fabs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_two_sample_statistic(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample_statistic needs samples");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::fabs(i / n - j / m));
  }
  return d;
}

double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m) {
  const double ne = static_cast<double>(n) * m / static_cast<double>(n + m);
  const double s = std::sqrt(ne);
  return kolmogorov_sf((s + 0.12 + 0.11 / s) * d);
}

double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

namespace {

struct Fenwick {
  explicit Fenwick(std::size_t n) : t(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < t.size(); i += i & (~i + 1)) ++t[i];
  }
  int prefix(std::size_t i) const {  // count of entries with index <= i
    int s = 0;
    for (++i; i > 0; i -= i & (~i + 1)) s += t[i];
    return s;
  }
  std::vector<int> t;
};

struct PooledPoints {
  std::vector<std::size_t> order;   // pooled indices sorted by x
  std::vector<std::size_t> y_rank;  // dense rank of y (ties share the highest rank)
  std::vector<double> x;
  std::size_t n = 0;
};

PooledPoints pool(std::span<const double> x1, std::span<const double> y1, std::span<const double> x2,
                  std::span<const double> y2) {
  if (x1.size() != y1.size() || x2.size() != y2.size() || x1.empty() || x2.empty())
    throw std::invalid_argument("bivariate samples must be non-empty and paired");
  PooledPoints p;
  p.n = x1.size() + x2.size();
  p.x.resize(p.n);
  std::vector<double> y(p.n);
  for (std::size_t i = 0; i < x1.size(); ++i) {
    p.x[i] = x1[i];
    y[i] = y1[i];
  }
  for (std::size_t i = 0; i < x2.size(); ++i) {
    p.x[x1.size() + i] = x2[i];
    y[x1.size() + i] = y2[i];
  }
  p.order.resize(p.n);
  std::iota(p.order.begin(), p.order.end(), 0);
  std::sort(p.order.begin(), p.order.end(), [&](std::size_t a, std::size_t b) { return p.x[a] < p.x[b]; });
  std::vector<double> ys = y;
  std::sort(ys.begin(), ys.end());
  p.y_rank.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i)
    p.y_rank[i] = static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), y[i]) - ys.begin()) - 1;
  return p;
}

double orthant_statistic(const PooledPoints& p, const std::vector<char>& in_first, std::size_t n1) {
  const std::size_t n2 = p.n - n1;
  Fenwick f1(p.n), f2(p.n);
  double d = 0.0;
  std::size_t g = 0;
  while (g < p.n) {
    std::size_t e = g;
    while (e < p.n && p.x[p.order[e]] == p.x[p.order[g]]) {
      const std::size_t k = p.order[e];
      (in_first[k] ? f1 : f2).add(p.y_rank[k]);
      ++e;
    }
    for (std::size_t q = g; q < e; ++q) {
      const std::size_t k = p.order[q];
      const double c1 = f1.prefix(p.y_rank[k]) / static_cast<double>(n1);
      const double c2 = f2.prefix(p.y_rank[k]) / static_cast<double>(n2);
      d = std::max(d, std::fabs(c1 - c2));
    }
    g = e;
  }
  return d;
}

}  // namespace

double ecdf2_two_sample_statistic(std::span<const double> x1, std::span<const double> y1,
                                  std::span<const double> x2, std::span<const double> y2) {
  const PooledPoints p = pool(x1, y1, x2, y2);
  std::vector<char> first(p.n, 0);
  std::fill(first.begin(), first.begin() + static_cast<std::ptrdiff_t>(x1.size()), 1);
  return orthant_statistic(p, first, x1.size());
}

PermutationTest ecdf2_permutation_test(std::span<const double> x1, std::span<const double> y1,
                                       std::span<const double> x2, std::span<const double> y2,
                                       int permutations, Rng& rng) {
  if (permutations < 1) throw std::invalid_argument("permutations must be positive");
  const PooledPoints p = pool(x1, y1, x2, y2);
  std::vector<char> labels(p.n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(x1.size()), 1);
  const double observed = orthant_statistic(p, labels, x1.size());
  int exceed = 0;
  for (int r = 0; r < permutations; ++r) {
    for (std::size_t i = p.n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
      std::swap(labels[i], labels[std::min(j, i)]);
    }
    if (orthant_statistic(p, labels, x1.size()) >= observed) ++exceed;
  }
  return {observed, (exceed + 1.0) / (permutations + 1.0)};
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation needs paired samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return sxx == syy ? 1.0 : 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Estimate correlation_estimate(std::span<const double> x, std::span<const double> y, std::size_t batches) {
  if (batches < 2 || x.size() < 2 * batches) throw std::invalid_argument("too few samples for batch means");
  const std::size_t len = x.size() / batches;
  MomentAccumulator acc;
  for (std::size_t b = 0; b < batches; ++b)
    acc.add(pearson_correlation(x.subspan(b * len, len), y.subspan(b * len, len)));
  // The full-sample correlation is the point estimate; batch spread gives the error.
  return {pearson_correlation(x, y), std::sqrt(acc.variance() / static_cast<double>(batches))};
}

}  // namespace msbp
