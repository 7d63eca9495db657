// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msbp/specfun.hpp"

namespace msbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_params(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw std::domain_error("alpha and beta must be positive and finite");
}

void check_stats(const AllocationStats& s) {
  if (s.a.size() != s.kappa || s.b.size() != s.kappa) throw std::invalid_argument("inconsistent allocation stats");
  for (std::size_t j = 0; j < s.kappa; ++j)
    if (s.a[j] < 0 || s.b[j] < 0) throw std::invalid_argument("allocation counts must be nonnegative");
}

// Running log-sum-exp over nonnegative terms given in log form.
struct LogSum {
  double max = kNegInf;
  double scaled = 0.0;
  void add(double t) {
    if (t == kNegInf) return;
    if (t <= max) {
      scaled += std::exp(t - max);
    } else {
      scaled = scaled * std::exp(max - t) + 1.0;
      max = t;
    }
  }
  double log_value() const { return scaled > 0.0 ? max + std::log(scaled) : kNegInf; }
  double value() const { return scaled > 0.0 ? std::exp(log_value()) : 0.0; }
};

// log (x)_{A} (y)_{B} / (x + y)_{A+B}
double log_beta_moment(double x, double y, int A, int B) {
  return log_rising_factorial(x, A) + log_rising_factorial(y, B) - log_rising_factorial(x + y, A + B);
}

// log of the BetaBinomial factor at position j (0-based) given z_{j-1} = zp and z_j = z.
struct BmsbFactor {
  double alpha, beta;
  int N;
  std::vector<double> log_choose;

  BmsbFactor(double a, double b, int n) : alpha(a), beta(b), N(n), log_choose(n + 1) {
    for (int z = 0; z <= n; ++z) log_choose[z] = log_binomial_coefficient(n, z);
  }
  double operator()(bool first, int zp, int z, int a, int b) const {
    const double ap = first ? alpha : alpha + zp;
    const double bp = first ? beta : beta + (N - zp);
    return log_choose[z] + log_beta_moment(ap, bp, a + z, b + N - z);
  }
};

}  // namespace

AllocationStats AllocationStats::from_counts(std::vector<int> a) {
  AllocationStats s;
  s.kappa = a.size();
  s.b.assign(a.size(), 0);
  int tail = 0;
  for (std::size_t j = a.size(); j-- > 0;) {
    if (a[j] < 0) throw std::invalid_argument("allocation counts must be nonnegative");
    s.b[j] = tail;
    tail += a[j];
  }
  s.a = std::move(a);
  return s;
}

AllocationStats AllocationStats::from_allocations(const std::vector<std::size_t>& d) {
  std::size_t kappa = 0;
  for (std::size_t di : d) {
    if (di == 0) throw std::invalid_argument("allocations are 1-based");
    kappa = std::max(kappa, di);
  }
  std::vector<int> a(kappa, 0);
  for (std::size_t di : d) ++a[di - 1];
  return from_counts(std::move(a));
}

double mixed_moment_bmsb_stationary(double alpha, double beta, int N, const AllocationStats& stats) {
  check_params(alpha, beta);
  check_stats(stats);
  if (N < 0) throw std::domain_error("N must be nonnegative");
  const std::size_t k = stats.kappa;
  if (k == 0) return 1.0;
  if (k > 8 || N > 12) throw SizeError("enumeration limited to kappa <= 8 and N <= 12");
  const double terms = std::pow(static_cast<double>(N + 1), static_cast<double>(k));
  if (terms > 1e8) throw SizeError("enumeration exceeds 1e8 terms");

  const BmsbFactor factor(alpha, beta, N);
  const int M = N + 1;
  // table[j][zp * M + z]
  std::vector<std::vector<double>> table(k, std::vector<double>(static_cast<std::size_t>(M) * M));
  for (std::size_t j = 0; j < k; ++j)
    for (int zp = 0; zp < M; ++zp)
      for (int z = 0; z < M; ++z)
        table[j][static_cast<std::size_t>(zp) * M + z] = factor(j == 0, zp, z, stats.a[j], stats.b[j]);

  std::vector<int> z(k, 0);
  std::vector<double> partial(k);
  auto recompute = [&](std::size_t from) {
    for (std::size_t l = from; l < k; ++l) {
      const int zp = l == 0 ? 0 : z[l - 1];
      partial[l] = (l == 0 ? 0.0 : partial[l - 1]) + table[l][static_cast<std::size_t>(zp) * M + z[l]];
    }
  };
  LogSum sum;
  recompute(0);
  for (;;) {
    sum.add(partial[k - 1]);
    std::size_t p = k;
    while (p > 0) {
      --p;
      if (++z[p] < M) break;
      z[p] = 0;
      if (p == 0) return sum.value();
    }
    recompute(p);
  }
}

double mixed_moment_bmsb_transfer(double alpha, double beta, int N, const AllocationStats& stats) {
  check_params(alpha, beta);
  check_stats(stats);
  if (N < 0) throw std::domain_error("N must be nonnegative");
  const std::size_t k = stats.kappa;
  if (k == 0) return 1.0;
  const BmsbFactor factor(alpha, beta, N);
  const int M = N + 1;
  // Messages are kept in log form to survive large counts.
  std::vector<double> msg(M), next(M);
  for (int z = 0; z < M; ++z) msg[z] = factor(true, 0, z, stats.a[0], stats.b[0]);
  for (std::size_t j = 1; j < k; ++j) {
    for (int z = 0; z < M; ++z) {
      LogSum s;
      for (int zp = 0; zp < M; ++zp) s.add(msg[zp] + factor(false, zp, z, stats.a[j], stats.b[j]));
      next[z] = s.log_value();
    }
    std::swap(msg, next);
  }
  LogSum total;
  for (double m : msg) total.add(m);
  return total.value();
}

double mixed_moment_lmsb_stationary(double alpha, double beta, double rho, const AllocationStats& stats) {
  check_params(alpha, beta);
  check_stats(stats);
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("rho must lie in [0, 1]");
  const std::size_t k = stats.kappa;
  if (k == 0) return 1.0;
  if (k > 20) throw SizeError("breakpoint enumeration limited to kappa <= 20");
  const double log_rho = std::log(rho);
  const double log_1mrho = std::log1p(-rho);
  LogSum sum;
  const std::uint32_t subsets = 1u << (k - 1);
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    // bit i set <=> position i + 2 is a breakpoint
    const int r = 1 + __builtin_popcount(mask);
    const int copies = static_cast<int>(k) - r;
    double t = 0.0;
    if (copies > 0) t += copies * log_rho;
    if (r > 1) t += (r - 1) * log_1mrho;
    if (t == kNegInf || std::isnan(t)) continue;
    int A = 0, B = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const bool starts = j > 0 && ((mask >> (j - 1)) & 1u);
      if (starts) {
        t += log_beta_moment(alpha, beta, A, B);
        A = B = 0;
      }
      A += stats.a[j];
      B += stats.b[j];
    }
    t += log_beta_moment(alpha, beta, A, B);
    sum.add(t);
  }
  return sum.value();
}

double mixed_moment_lmsb_recursive(double alpha, double beta, double rho, const AllocationStats& stats) {
  check_params(alpha, beta);
  check_stats(stats);
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("rho must lie in [0, 1]");
  const std::size_t k = stats.kappa;
  if (k == 0) return 1.0;
  const double log_rho = std::log(rho);
  const double log_1mrho = std::log1p(-rho);
  // S[e] = log of the total weight of configurations on positions 1..e.
  std::vector<double> S(k + 1, kNegInf);
  S[0] = 0.0;
  for (std::size_t e = 1; e <= k; ++e) {
    LogSum acc;
    int A = 0, B = 0;
    for (std::size_t s = e; s >= 1; --s) {
      A += stats.a[s - 1];
      B += stats.b[s - 1];
      const std::size_t copies = e - s;
      double t = S[s - 1] + log_beta_moment(alpha, beta, A, B);
      if (copies > 0) t += static_cast<double>(copies) * log_rho;
      if (s > 1) t += log_1mrho;
      if (!std::isnan(t)) acc.add(t);
    }
    S[e] = acc.log_value();
  }
  return S[k] == kNegInf ? 0.0 : std::exp(S[k]);
}

double allocation_logprob_given_v(const LengthPrefix& prefix, const AllocationStats& stats) {
  check_stats(stats);
  if (stats.kappa > prefix.size()) throw std::invalid_argument("prefix shorter than kappa");
  double s = 0.0;
  for (std::size_t j = 0; j < stats.kappa; ++j) {
    const double v = prefix.values[j];
    if (stats.a[j] > 0) {
      if (v <= 0.0) return kNegInf;
      s += stats.a[j] * std::log(v);
    }
    if (stats.b[j] > 0) {
      if (v >= 1.0) return kNegInf;
      s += stats.b[j] * std::log1p(-v);
    }
  }
  return s;
}

TieSeriesResult tie_probability_series(const TieSeriesParams& params, std::size_t J, double tail_bound_target) {
  check_params(params.alpha, params.beta);
  if (J == 0 || J > kMaxTieSeriesTerms) throw std::invalid_argument("truncation J must lie in [1, 1000]");
  const double alpha = params.alpha;
  const double beta = params.beta;
  TieSeriesResult res;

  if (params.family == TieSeriesParams::Family::BmsbStationary) {
    const int N = params.N;
    if (N < 0) throw std::domain_error("N must be nonnegative");
    const BmsbFactor factor(alpha, beta, N);
    const int M = N + 1;
    // Forward message over z_j for the weight prod_{l<=j} (1-v_l)^2.
    std::vector<double> msg(M, kNegInf), next(M);
    std::vector<double> with_a(static_cast<std::size_t>(M) * M), with_b(static_cast<std::size_t>(M) * M);
    for (int zp = 0; zp < M; ++zp)
      for (int z = 0; z < M; ++z) {
        with_a[static_cast<std::size_t>(zp) * M + z] = factor(false, zp, z, 2, 0);
        with_b[static_cast<std::size_t>(zp) * M + z] = factor(false, zp, z, 0, 2);
      }
    double value = 0.0;
    for (std::size_t j = 1; j <= J; ++j) {
      const bool first = j == 1;
      LogSum term;
      for (int z = 0; z < M; ++z) {
        LogSum s_tail;
        if (first) {
          term.add(factor(true, 0, z, 2, 0));
          s_tail.add(factor(true, 0, z, 0, 2));
        } else {
          for (int zp = 0; zp < M; ++zp) {
            term.add(msg[zp] + with_a[static_cast<std::size_t>(zp) * M + z]);
            s_tail.add(msg[zp] + with_b[static_cast<std::size_t>(zp) * M + z]);
          }
        }
        next[z] = s_tail.log_value();
      }
      std::swap(msg, next);
      value += term.value();
      LogSum bound;
      for (double m : msg) bound.add(m);
      res.terms = j;
      res.value = value;
      res.tail_bound = bound.value();
      if (res.tail_bound <= tail_bound_target) break;
    }
  } else {
    const double rho = params.rho;
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("rho must lie in [0, 1]");
    const double log_rho = std::log(rho);
    const double log_1mrho = std::log1p(-rho);
    // S[e]: log weight of configurations on 1..e with (1-v)^2 at every position.
    std::vector<double> S{0.0};
    double value = 0.0;
    for (std::size_t j = 1; j <= J; ++j) {
      LogSum term, tail;
      for (std::size_t s = j; s >= 1; --s) {
        const std::size_t copies = j - s;
        double base = S[s - 1];
        if (copies > 0) base += static_cast<double>(copies) * log_rho;
        if (s > 1) base += log_1mrho;
        if (std::isnan(base) || base == kNegInf) continue;
        const int len = static_cast<int>(j - s);
        term.add(base + log_beta_moment(alpha, beta, 2, 2 * len));
        tail.add(base + log_beta_moment(alpha, beta, 0, 2 * (len + 1)));
      }
      S.push_back(tail.log_value());
      value += term.value();
      res.terms = j;
      res.value = value;
      res.tail_bound = tail.value();
      if (res.tail_bound <= tail_bound_target) break;
    }
  }
  res.converged = res.tail_bound <= tail_bound_target;
  return res;
}

}  // namespace msbp
