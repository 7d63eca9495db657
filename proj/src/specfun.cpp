// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace msbp {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = 1e-300;
constexpr double kClampLow = 1e-300;

void check_shape(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("beta shape parameters must be positive and finite");
}

// lgamma(x) - Stirling approximation without the correction series.
double stirling_correction(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

struct TailEval {
  double lower;
  double upper;
  double log_lower;
  double log_upper;
};

// Interior x only. The tail on the near side of the mean is evaluated
// directly (in log form); the other one as its complement.
TailEval tails_interior(double x, double a, double b) {
  const double log_front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  TailEval t{};
  if (x < (a + 1.0) / (a + b + 2.0)) {
    t.log_lower = log_front + std::log(beta_cf(a, b, x) / a);
    t.lower = std::exp(t.log_lower);
    t.upper = 1.0 - t.lower;
    t.log_upper = std::log1p(-t.lower);
  } else {
    t.log_upper = log_front + std::log(beta_cf(b, a, 1.0 - x) / b);
    t.upper = std::exp(t.log_upper);
    t.lower = 1.0 - t.upper;
    t.log_lower = std::log1p(-t.upper);
  }
  return t;
}

double inverse_normal_rough(double p) {
  // Abramowitz & Stegun 26.2.22, adequate as a starting point.
  const double pp = p < 0.5 ? p : 1.0 - p;
  const double t = std::sqrt(-2.0 * std::log(pp));
  double z = t - (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481));
  return p < 0.5 ? -z : z;
}

double initial_guess(double p, double a, double b) {
  if (a >= 1.0 && b >= 1.0) {
    const double s = a + b;
    const double mean = a / s;
    const double sd = std::sqrt(a * b / (s * s * (s + 1.0)));
    const double x = mean + sd * inverse_normal_rough(std::clamp(p, 1e-300, 1.0 - 1e-16));
    if (x > 0.0 && x < 1.0) return x;
  }
  // Power-law behaviour of both tails.
  const double lna = std::log(a / (a + b));
  const double lnb = std::log(b / (a + b));
  const double t = std::exp(a * lna) / a;
  const double u = std::exp(b * lnb) / b;
  const double w = t + u;
  if (p < t / w) return std::pow(a * w * p, 1.0 / a);
  return 1.0 - std::pow(b * w * (1.0 - p), 1.0 / b);
}

// Solves lower(x) = target (use_upper = false) or upper(x) = target. The
// residual is taken on the log of the targeted tail and Newton steps are
// made in log x or log(1 - x), which is exact for power-law tails.
double solve_inverse(double target, bool use_upper, double a, double b, const InverseOptions& opts,
                     double guess) {
  const double log_target = std::log(target);
  double lo = 0.0;
  double hi = 1.0;
  double x = std::clamp(guess, kClampLow, 1.0 - kEps);
  double best_x = x;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iterations; ++it) {
    const TailEval t = tails_interior(x, a, b);
    const double tail = use_upper ? t.upper : t.lower;
    const double log_tail = use_upper ? t.log_upper : t.log_lower;
    // Increasing in x in both cases.
    const double r = use_upper ? log_target - log_tail : log_tail - log_target;
    const double abs_res = std::fabs(tail - target);
    if (abs_res < best_res) {
      best_res = abs_res;
      best_x = x;
    }
    if (r == 0.0) return x;
    if (r < 0.0) lo = x; else hi = x;

    // d r / d x = pdf / tail
    const double log_pdf = beta_log_pdf(x, a, b);
    const double ratio = std::exp(log_tail - log_pdf);  // 1 / (dr/dx)
    double next;
    double step;
    if (x < 0.5) {
      step = -r * ratio / x;
      next = x * std::exp(step);
    } else {
      step = r * ratio / (1.0 - x);
      next = 1.0 - (1.0 - x) * std::exp(step);
    }
    if (abs_res <= opts.tolerance && std::fabs(step) <= opts.relative_step) return x;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      if (lo == 0.0) {
        next = hi * 1e-3;
      } else if (hi == 1.0) {
        next = 1.0 - (1.0 - lo) * 1e-3;
      } else if (hi <= 0.5 && hi > 2.0 * lo) {
        next = std::sqrt(lo * hi);
      } else if (lo >= 0.5 && (1.0 - lo) > 2.0 * (1.0 - hi)) {
        next = 1.0 - std::sqrt((1.0 - lo) * (1.0 - hi));
      } else {
        next = 0.5 * (lo + hi);
      }
    }
    if (next == x || hi - lo <= 2.0 * kEps * hi) return abs_res <= best_res ? x : best_x;
    x = next;
  }
  return best_x;
}

}  // namespace

double log_beta(double a, double b) {
  check_shape(a, b);
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (lo >= 10.0) {
    const double s = a + b;
    // (lo-1/2) log(lo/s) + hi log(hi/s) - 1/2 log hi, written to avoid
    // cancellation between large logarithms.
    const double v = (lo - 0.5) * -std::log1p(hi / lo) + hi * -std::log1p(lo / hi) - 0.5 * std::log(hi);
    return kHalfLog2Pi + v + stirling_correction(lo) + stirling_correction(hi) - stirling_correction(s);
  }
  if (hi >= 10.0) {
    // lgamma(hi) - lgamma(lo + hi) via the Stirling form.
    const double s = lo + hi;
    const double diff = -(hi - 0.5) * std::log1p(lo / hi) - lo * std::log(s) + lo +
                        stirling_correction(hi) - stirling_correction(s);
    return std::lgamma(lo) + diff;
  }
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_rising_factorial(double x, unsigned n) {
  if (n == 0) return 0.0;
  if (!(x > 0.0)) throw std::domain_error("log_rising_factorial requires x > 0");
  if (n <= 64) {
    double s = 0.0;
    for (unsigned i = 0; i < n; ++i) s += std::log(x + i);
    return s;
  }
  return std::lgamma(x + n) - std::lgamma(x);
}

double rising_factorial(double x, unsigned n) {
  double p = 1.0;
  for (unsigned i = 0; i < n; ++i) {
    p *= x + i;
    if (!std::isfinite(p)) break;
  }
  if (std::isfinite(p)) return p;
  return std::exp(log_rising_factorial(x, n));
}

double log_binomial_coefficient(unsigned n, unsigned k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double beta_log_pdf(double x, double a, double b) {
  check_shape(a, b);
  if (x < 0.0 || x > 1.0) return -std::numeric_limits<double>::infinity();
  const double inf = std::numeric_limits<double>::infinity();
  if (x == 0.0) return a < 1.0 ? inf : (a == 1.0 ? -log_beta(a, b) : -inf);
  if (x == 1.0) return b < 1.0 ? inf : (b == 1.0 ? -log_beta(a, b) : -inf);
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

BetaTails reg_inc_beta_tails(double x, double a, double b) {
  check_shape(a, b);
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("reg_inc_beta requires x in [0, 1]");
  if (x == 0.0) return {0.0, 1.0};
  if (x == 1.0) return {1.0, 0.0};
  const TailEval t = tails_interior(x, a, b);
  return {std::clamp(t.lower, 0.0, 1.0), std::clamp(t.upper, 0.0, 1.0)};
}

double reg_inc_beta(double x, double a, double b) { return reg_inc_beta_tails(x, a, b).lower; }

double inv_reg_inc_beta(double p, double a, double b, const InverseOptions& opts) {
  check_shape(a, b);
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("inv_reg_inc_beta requires p in [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double guess = initial_guess(p, a, b);
  if (p <= 0.5) return solve_inverse(std::max(p, kClampLow), false, a, b, opts, guess);
  return solve_inverse(1.0 - p, true, a, b, opts, guess);
}

double inv_reg_inc_beta_upper(double q, double a, double b, const InverseOptions& opts) {
  check_shape(a, b);
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("inv_reg_inc_beta_upper requires q in [0, 1]");
  if (q == 0.0) return 1.0;
  if (q == 1.0) return 0.0;
  const double guess = initial_guess(1.0 - q, a, b);
  if (q <= 0.5) return solve_inverse(std::max(q, kClampLow), true, a, b, opts, guess);
  return solve_inverse(1.0 - q, false, a, b, opts, guess);
}

MarginalSeq MarginalSeq::pitman_yor(double sigma, double theta) {
  if (!(sigma >= 0.0 && sigma < 1.0)) throw std::domain_error("Pitman-Yor sigma must lie in [0, 1)");
  if (!(theta > -sigma) || !std::isfinite(theta)) throw std::domain_error("Pitman-Yor theta must exceed -sigma");
  return MarginalSeq(PitmanYor{sigma, theta});
}

MarginalSeq MarginalSeq::const_beta(double alpha, double beta) {
  check_shape(alpha, beta);
  return MarginalSeq(ConstBeta{alpha, beta});
}

MarginalSeq MarginalSeq::beta_one_theta(std::function<double(std::size_t)> beta) {
  if (!beta) throw std::invalid_argument("beta_one_theta requires a rule");
  return MarginalSeq(BetaOneTheta{std::move(beta)});
}

MarginalSeq MarginalSeq::power_alpha(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::domain_error("power_alpha gamma must be nonnegative");
  return MarginalSeq(PowerAlpha{gamma});
}

MarginalSeq MarginalSeq::explicit_list(std::vector<BetaParams> head,
                                       std::function<BetaParams(std::size_t)> tail) {
  if (head.empty() && !tail) throw std::invalid_argument("explicit_list needs entries or a tail rule");
  for (const auto& p : head) check_shape(p.alpha, p.beta);
  return MarginalSeq(ExplicitList{std::move(head), std::move(tail)});
}

BetaParams MarginalSeq::at(std::size_t j) const {
  if (j == 0) throw std::out_of_range("marginal index starts at 1");
  const double dj = static_cast<double>(j);
  BetaParams p = std::visit(
      [&](const auto& r) -> BetaParams {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PitmanYor>) {
          return {1.0 - r.sigma, r.theta + dj * r.sigma};
        } else if constexpr (std::is_same_v<T, ConstBeta>) {
          return {r.alpha, r.beta};
        } else if constexpr (std::is_same_v<T, BetaOneTheta>) {
          return {1.0, r.beta(j)};
        } else if constexpr (std::is_same_v<T, PowerAlpha>) {
          return {1.0 + r.gamma / dj, 1.0};
        } else {
          if (j <= r.head.size()) return r.head[j - 1];
          if (r.tail) return r.tail(j);
          return r.head.back();
        }
      },
      rule_);
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    std::ostringstream os;
    os << "marginal " << j << " has invalid parameters (" << p.alpha << ", " << p.beta << ")";
    throw std::domain_error(os.str());
  }
  return p;
}

bool MarginalSeq::stationary() const {
  if (std::holds_alternative<ConstBeta>(rule_)) return true;
  if (const auto* py = std::get_if<PitmanYor>(&rule_)) return py->sigma == 0.0;
  if (const auto* pa = std::get_if<PowerAlpha>(&rule_)) return pa->gamma == 0.0;
  return false;
}

std::string MarginalSeq::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PitmanYor>) {
          os << "pitman_yor(sigma=" << r.sigma << ", theta=" << r.theta << ")";
        } else if constexpr (std::is_same_v<T, ConstBeta>) {
          os << "const_beta(alpha=" << r.alpha << ", beta=" << r.beta << ")";
        } else if constexpr (std::is_same_v<T, BetaOneTheta>) {
          os << "beta_one_theta";
        } else if constexpr (std::is_same_v<T, PowerAlpha>) {
          os << "power_alpha(gamma=" << r.gamma << ")";
        } else {
          os << "explicit_list(" << r.head.size() << " entries)";
        }
      },
      rule_);
  return os.str();
}

double marginal_cdf(const MarginalSeq& marg, std::size_t j, double v) {
  const BetaParams p = marg.at(j);
  return reg_inc_beta(v, p.alpha, p.beta);
}

double transport(const MarginalSeq& marg, std::size_t from, std::size_t to, double v,
                 const InverseOptions& opts) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("transport requires v in [0, 1]");
  const BetaParams pf = marg.at(from);
  const BetaParams pt = marg.at(to);
  if (v == 0.0 || v == 1.0 || pf == pt) return v;
  const BetaTails t = reg_inc_beta_tails(v, pf.alpha, pf.beta);
  if (t.lower <= 0.5) return inv_reg_inc_beta(std::max(t.lower, kClampLow), pt.alpha, pt.beta, opts);
  return inv_reg_inc_beta_upper(std::max(t.upper, kClampLow), pt.alpha, pt.beta, opts);
}

double upsilon(std::size_t j, double v, const MarginalSeq& marg) { return transport(marg, j, j + 1, v); }

double upsilon_inverse(std::size_t j, double v, const MarginalSeq& marg) {
  return transport(marg, j + 1, j, v);
}

double upsilon_composed(std::size_t j, double v, const MarginalSeq& marg) {
  return transport(marg, 1, j, v);
}

}  // namespace msbp
