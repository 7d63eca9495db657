// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/chains.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "msbp/stats.hpp"

namespace msbp {

TransitionSpec TransitionSpec::independent() { return {Family::Independent, 0, 0.0}; }

TransitionSpec TransitionSpec::completely_dependent() { return {Family::CompletelyDependent, 0, 0.0}; }

TransitionSpec TransitionSpec::beta_binomial(int N) {
  if (N < 0) throw std::domain_error("BetaBinomial N must be nonnegative");
  return {Family::BetaBinomial, N, 0.0};
}

TransitionSpec TransitionSpec::lazy(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("Lazy rho must lie in [0, 1]");
  return {Family::Lazy, 0, rho};
}

std::string TransitionSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family) {
    case Family::Independent: os << "independent"; break;
    case Family::CompletelyDependent: os << "completely_dependent"; break;
    case Family::BetaBinomial: os << "beta_binomial(N=" << N << ")"; break;
    case Family::Lazy: os << "lazy(rho=" << rho << ")"; break;
  }
  return os.str();
}

std::vector<std::size_t> LengthPrefix::breakpoints() const {
  std::vector<std::size_t> t;
  for (std::size_t j = 0; j < fresh.size(); ++j)
    if (fresh[j]) t.push_back(j + 1);
  return t;
}

int draw_bb_latent(const MarginalSeq& marg, int N, std::size_t j, double v, Rng& rng) {
  if (N == 0) return 0;
  return sample_binomial(rng, N, upsilon(j, v, marg));
}

namespace {

double draw_bb_next(const MarginalSeq& marg, int N, std::size_t j_next, int z, Rng& rng) {
  const BetaParams p = marg.at(j_next);
  return sample_beta(rng, p.alpha + z, p.beta + (N - z));
}

double draw_marginal(const MarginalSeq& marg, std::size_t j, Rng& rng) {
  const BetaParams p = marg.at(j);
  return sample_beta(rng, p.alpha, p.beta);
}

}  // namespace

TransitionDraw transition_sample(const TransitionSpec& trans, const MarginalSeq& marg, std::size_t j, double v,
                                 Rng& rng) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("transition_sample requires v in [0, 1]");
  TransitionDraw d;
  if (v == 1.0) {  // absorbing state
    d.v_next = 1.0;
    d.z = trans.N;
    d.copied = true;
    return d;
  }
  switch (trans.family) {
    case TransitionSpec::Family::Independent:
      d.v_next = draw_marginal(marg, j + 1, rng);
      break;
    case TransitionSpec::Family::CompletelyDependent:
      d.v_next = upsilon(j, v, marg);
      d.copied = true;
      break;
    case TransitionSpec::Family::BetaBinomial:
      d.z = draw_bb_latent(marg, trans.N, j, v, rng);
      d.v_next = draw_bb_next(marg, trans.N, j + 1, d.z, rng);
      break;
    case TransitionSpec::Family::Lazy:
      if (sample_bernoulli(rng, trans.rho)) {
        d.v_next = upsilon(j, v, marg);
        d.copied = true;
      } else {
        d.v_next = draw_marginal(marg, j + 1, rng);
      }
      break;
  }
  return d;
}

void extend_prefix(LengthPrefix& prefix, const MsbpModel& model, std::size_t m, Rng& rng) {
  const auto fam = model.trans.family;
  const bool bb = fam == TransitionSpec::Family::BetaBinomial;
  const bool lazy = fam == TransitionSpec::Family::Lazy;
  const int N = model.trans.N;
  if (m <= prefix.size()) return;
  if (prefix.values.empty()) {
    const double v1 = draw_marginal(model.marg, 1, rng);
    prefix.values.push_back(v1);
    if (bb) prefix.z.push_back(v1 == 1.0 ? N : draw_bb_latent(model.marg, N, 1, v1, rng));
    if (lazy) prefix.fresh.push_back(1);
  }
  while (prefix.size() < m) {
    const std::size_t j = prefix.size();
    const double v = prefix.values.back();
    if (bb) {
      // z_j was drawn with v_j; only the next length and its latent remain.
      double next;
      if (v == 1.0) {
        next = 1.0;
      } else {
        next = draw_bb_next(model.marg, N, j + 1, prefix.z.back(), rng);
      }
      prefix.values.push_back(next);
      prefix.z.push_back(next == 1.0 ? N : draw_bb_latent(model.marg, N, j + 1, next, rng));
    } else {
      const TransitionDraw d = transition_sample(model.trans, model.marg, j, v, rng);
      prefix.values.push_back(d.v_next);
      if (lazy) prefix.fresh.push_back(d.copied ? 0 : 1);
    }
  }
}

LengthPrefix sample_prefix(const MsbpModel& model, std::size_t m, Rng& rng) {
  if (m == 0) throw std::invalid_argument("sample_prefix requires m >= 1");
  LengthPrefix p;
  extend_prefix(p, model, m, rng);
  return p;
}

double marginal_check(const MsbpModel& model, std::size_t j, std::size_t n_samples, const Rng& rng) {
  if (n_samples < 100) throw std::invalid_argument("marginal_check requires at least 100 samples");
  std::vector<double> v(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng r = rng.split(i);
    v[i] = sample_prefix(model, j, r).values[j - 1];
  }
  const BetaParams p = model.marg.at(j);
  return ks_statistic(std::move(v), [&](double x) { return reg_inc_beta(x, p.alpha, p.beta); });
}

PropernessResult properness_diagnostic(const MsbpModel& model, double epsilon, std::size_t max_m, Rng& rng) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  PropernessResult res;
  LengthPrefix p;
  double log_remaining = 0.0;
  const double log_eps = std::log(epsilon);
  for (std::size_t m = 1; m <= max_m; ++m) {
    extend_prefix(p, model, m, rng);
    const double v = p.values.back();
    if (v >= 1.0) {
      res.m_star = m;
      res.remaining_mass = 0.0;
      return res;
    }
    log_remaining += std::log1p(-v);
    if (log_remaining < log_eps) {
      res.m_star = m;
      res.remaining_mass = std::exp(log_remaining);
      return res;
    }
  }
  res.remaining_mass = std::exp(log_remaining);
  return res;
}

double mean_length_partial_sum(const MarginalSeq& marg, std::size_t terms) {
  double s = 0.0;
  for (std::size_t j = 1; j <= terms; ++j) {
    const BetaParams p = marg.at(j);
    s += p.alpha / (p.alpha + p.beta);
  }
  return s;
}

}  // namespace msbp
