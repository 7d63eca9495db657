// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/weights.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>

#include "msbp/parallel.hpp"
#include "msbp/specfun.hpp"

namespace msbp {

namespace {

std::string truncation_message(double mass, std::size_t length) {
  std::ostringstream os;
  os << "stick-breaking extension reached cap " << length << " with mass " << mass;
  return os.str();
}

}  // namespace

TruncationError::TruncationError(double achieved_mass, std::size_t length)
    : std::runtime_error(truncation_message(achieved_mass, length)), achieved_mass_(achieved_mass), length_(length) {}

void WeightPrefix::push(double v) {
  weights.push_back(v * remaining);
  if (v >= 1.0) {
    remaining = 0.0;
    log_remaining = -std::numeric_limits<double>::infinity();
    return;
  }
  log_remaining += std::log1p(-v);
  remaining = remaining < 1e-300 ? std::exp(log_remaining) : remaining * (1.0 - v);
}

WeightPrefix stick_break(const LengthPrefix& prefix) {
  WeightPrefix w;
  w.weights.reserve(prefix.size());
  for (double v : prefix.values) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("length variables must lie in [0, 1]");
    w.push(v);
  }
  return w;
}

StickBreakingDraw::StickBreakingDraw(const MsbpModel& model, Rng& rng, std::size_t cap)
    : model_(&model), rng_(&rng), cap_(cap) {}

void StickBreakingDraw::extend_to(std::size_t m) {
  if (m <= size()) return;
  if (m > cap_) {
    extend_to(cap_);
    throw TruncationError(1.0 - weights_.remaining, cap_);
  }
  extend_prefix(lengths_, *model_, m, *rng_);
  for (std::size_t j = weights_.size(); j < m; ++j) weights_.push(lengths_.values[j]);
}

std::size_t StickBreakingDraw::extend_until(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("extend_until requires u in (0, 1)");
  const double target = 1.0 - u;
  // Scan the existing prefix first.
  double remaining = 1.0;
  for (std::size_t i = 0; i < size(); ++i) {
    remaining = lengths_.values[i] >= 1.0 ? 0.0 : remaining * (1.0 - lengths_.values[i]);
    if (remaining < target) return i + 1;
  }
  while (!(weights_.remaining < target)) {
    if (size() >= cap_) throw TruncationError(1.0 - weights_.remaining, size());
    extend_to(size() + 1);
  }
  return size();
}

double StickBreakingDraw::weight(std::size_t j) {
  if (j == 0) throw std::out_of_range("weights are 1-based");
  extend_to(j);
  return weights_.weights[j - 1];
}

WeightPrefix extend_until(const MsbpModel& model, double u, Rng& rng, std::size_t cap) {
  StickBreakingDraw d(model, rng, cap);
  const std::size_t J = d.extend_until(u);
  WeightPrefix w = d.weights();
  w.weights.resize(J);
  return w;
}

std::size_t size_biased_pick(StickBreakingDraw& draw, std::vector<char>& taken, double picked_mass, Rng& rng) {
  const double unpicked = 1.0 - picked_mass;
  if (!(unpicked > 0.0)) {
    std::size_t j = 1;
    while (j < taken.size() && taken[j]) ++j;
    return j;
  }
  const double target = rng.uniform() * unpicked;
  double cum = 0.0;
  for (std::size_t j = 1;; ++j) {
    if (j >= taken.size()) taken.resize(2 * j + 8, 0);
    if (taken[j]) continue;
    cum += draw.weight(j);
    if (cum > target) return j;
    // Only rounding separates cum from the unpicked mass.
    if (j == draw.size() && draw.weights().remaining <= 1e-15 * unpicked) return j;
  }
}

SizeBiasedDraw size_biased_sample(const MsbpModel& model, std::size_t k, Rng& rng, std::size_t cap) {
  if (k == 0) throw std::invalid_argument("size_biased_sample requires k >= 1");
  StickBreakingDraw draw(model, rng, cap);
  std::vector<char> taken(16, 0);
  SizeBiasedDraw out;
  double picked_mass = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = size_biased_pick(draw, taken, picked_mass, rng);
    if (j >= taken.size()) taken.resize(2 * j + 8, 0);
    taken[j] = 1;
    const double w = j <= draw.size() ? draw.weights().weights[j - 1] : 0.0;
    out.indices.push_back(j);
    out.picked.push_back(w);
    picked_mass += w;
  }
  out.prefix = draw.weights();
  return out;
}

std::vector<std::size_t> sample_block_creation_times(const MsbpModel& model, std::size_t n_max, Rng& rng) {
  if (n_max == 0) throw std::invalid_argument("n must be at least 1");
  StickBreakingDraw draw(model, rng);
  std::vector<char> taken(16, 0);
  std::vector<std::size_t> times{1};
  double picked_mass = 0.0;
  std::size_t t = 1;
  for (;;) {
    const std::size_t j = size_biased_pick(draw, taken, picked_mass, rng);
    if (j >= taken.size()) taken.resize(2 * j + 8, 0);
    taken[j] = 1;
    picked_mass += j <= draw.size() ? draw.weights().weights[j - 1] : 0.0;
    const double p_new = 1.0 - picked_mass;
    if (!(p_new > 0.0)) return times;
    const std::uint64_t gap = sample_geometric(rng, std::min(p_new, 1.0));
    if (gap > n_max - t) return times;
    t += gap;
    times.push_back(t);
  }
}

std::size_t sample_Kn(const MsbpModel& model, std::size_t n, Rng& rng) {
  return sample_block_creation_times(model, n, rng).size();
}

Estimate tie_probability_mc(const MsbpModel& model, std::uint64_t reps, const Rng& rng, int threads) {
  if (reps < 100) throw std::invalid_argument("tie_probability_mc requires reps >= 100");
  return mc_estimate(reps, rng, threads, [&](Rng& r) {
    StickBreakingDraw draw(model, r);
    std::vector<char> taken(16, 0);
    try {
      const std::size_t j = size_biased_pick(draw, taken, 0.0, r);
      return j <= draw.size() ? draw.weights().weights[j - 1] : 0.0;
    } catch (const TruncationError&) {
      // The pick lies beyond the cap, so its weight is below the remaining mass.
      return 0.0;
    }
  });
}

Estimate eppf_mc(const MsbpModel& model, const std::vector<int>& composition, std::uint64_t reps, const Rng& rng,
                 int threads) {
  if (composition.empty()) throw std::invalid_argument("composition must be non-empty");
  for (int c : composition)
    if (c < 1) throw std::invalid_argument("composition entries must be positive");
  const std::size_t k = composition.size();
  bool trivial = k == 1 && composition[0] == 1;
  if (trivial) return {1.0, 0.0};
  return mc_estimate(reps, rng, threads, [&](Rng& r) {
    const SizeBiasedDraw s = size_biased_sample(model, k, r);
    double value = 1.0;
    double cum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      value *= std::pow(s.picked[i], composition[i] - 1);
      cum += s.picked[i];
      if (i + 1 < k) value *= std::max(0.0, 1.0 - cum);
    }
    return value;
  });
}

double functional_covariance(double tau_p, double p0_A, double p0_B, double p0_AB) {
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in01(tau_p) || !in01(p0_A) || !in01(p0_B) || !in01(p0_AB))
    throw std::domain_error("functional_covariance arguments must lie in [0, 1]");
  if (p0_AB > std::min(p0_A, p0_B) + 1e-15 || p0_AB < p0_A + p0_B - 1.0 - 1e-15)
    throw std::domain_error("inconsistent set probabilities");
  return tau_p * (p0_AB - p0_A * p0_B);
}

Estimate prob_decreasing_mc(const MsbpModel& model, std::size_t j, std::uint64_t reps, const Rng& rng, int threads) {
  if (j == 0) throw std::invalid_argument("index j starts at 1");
  if (reps < 100) throw std::invalid_argument("prob_decreasing_mc requires reps >= 100");
  return mc_estimate(reps, rng, threads, [&](Rng& r) {
    const LengthPrefix p = sample_prefix(model, j + 1, r);
    const WeightPrefix w = stick_break(p);
    return w.weights[j] <= w.weights[j - 1] ? 1.0 : 0.0;
  });
}

namespace {

// E[g(v)], v ~ Be(a, b), restricted to v < 1/2, plus the mass on [1/2, 1]
// where c(v) = 1 and every incomplete-beta term equals one.
template <class G>
double expect_below_half(double a, double b, G g) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double lb = log_beta(a, b);
  auto f = [&](double v) {
    if (v <= 0.0 || v >= 0.5) return 0.0;
    return std::exp((a - 1.0) * std::log(v) + (b - 1.0) * std::log1p(-v) - lb) * g(v);
  };
  const double inner = integrator.integrate(f, 0.0, 0.5, 1e-12);
  return inner + reg_inc_beta_tails(0.5, a, b).upper;
}

}  // namespace

double prob_decreasing_lmsb(const MarginalSeq& marg, double rho, std::size_t j) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("rho must lie in [0, 1]");
  if (j == 0) throw std::invalid_argument("index j starts at 1");
  if (!marg.stationary() && !std::holds_alternative<MarginalSeq::PitmanYor>(marg.rule()))
    throw std::invalid_argument("prob_decreasing_lmsb requires Pitman-Yor or stationary marginals");
  const BetaParams pj = marg.at(j);
  const BetaParams pn = marg.at(j + 1);
  const double fresh = expect_below_half(pj.alpha, pj.beta, [&](double v) {
    return reg_inc_beta(v / (1.0 - v), pn.alpha, pn.beta);
  });
  return rho + (1.0 - rho) * fresh;
}

double prob_decreasing_bmsb(const MarginalSeq& marg, int N, std::size_t j) {
  if (N < 0) throw std::domain_error("N must be nonnegative");
  if (j == 0) throw std::invalid_argument("index j starts at 1");
  const BetaParams pj = marg.at(j);
  const BetaParams pn = marg.at(j + 1);
  std::vector<double> log_choose(N + 1);
  for (int z = 0; z <= N; ++z) log_choose[z] = log_binomial_coefficient(N, z);
  return expect_below_half(pj.alpha, pj.beta, [&](double v) {
    const double c = v / (1.0 - v);
    const double u = upsilon(j, v, marg);
    double s = 0.0;
    for (int z = 0; z <= N; ++z) {
      double bin;
      if (u <= 0.0) bin = z == 0 ? 1.0 : 0.0;
      else if (u >= 1.0) bin = z == N ? 1.0 : 0.0;
      else bin = std::exp(log_choose[z] + z * std::log(u) + (N - z) * std::log1p(-u));
      if (bin > 0.0) s += bin * reg_inc_beta(c, pn.alpha + z, pn.beta + (N - z));
    }
    return s;
  });
}

}  // namespace msbp
