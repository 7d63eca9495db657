// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "msbp/specfun.hpp"

namespace msbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k log x with the convention 0 log 0 = 0.
inline double xlogy(double k, double x) {
  if (k == 0.0) return 0.0;
  return x > 0.0 ? k * std::log(x) : kNegInf;
}

inline double xlog1my(double k, double x) {
  if (k == 0.0) return 0.0;
  return x < 1.0 ? k * std::log1p(-x) : kNegInf;
}

inline double log_lik(int a, int b, double x) { return xlogy(a, x) + xlog1my(b, x); }

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double log_beta_moment(double x, double y, int A, int B) {
  return log_rising_factorial(x, A) + log_rising_factorial(y, B) - log_rising_factorial(x + y, A + B);
}

}  // namespace

HyperPrior HyperPrior::discrete_n(std::vector<double> pmf) {
  if (pmf.empty()) throw std::invalid_argument("N prior needs at least one cell");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("N prior masses must be nonnegative");
    total += p;
  }
  if (!(total > 0.0)) throw std::invalid_argument("N prior has no mass");
  for (double& p : pmf) p /= total;
  HyperPrior h;
  h.kind = Kind::DiscreteN;
  h.n_pmf = std::move(pmf);
  return h;
}

HyperPrior HyperPrior::uniform_n(int n_max) {
  if (n_max < 0) throw std::invalid_argument("N_max must be nonnegative");
  return discrete_n(std::vector<double>(static_cast<std::size_t>(n_max) + 1, 1.0));
}

HyperPrior HyperPrior::beta_rho(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("rho prior parameters must be positive");
  HyperPrior h;
  h.kind = Kind::BetaRho;
  h.a = a;
  h.b = b;
  return h;
}

void resize_prefix(GibbsState& state, std::size_t m, Rng& rng) {
  m = std::max({m, state.stats.kappa, std::size_t{1}});
  LengthPrefix& p = state.prefix;
  if (m < p.size()) {
    p.values.resize(m);
    if (!p.z.empty()) p.z.resize(m);
    if (!p.fresh.empty()) p.fresh.resize(m);
    return;
  }
  extend_prefix(p, state.model, m, rng);
}

// ---------------------------------------------------------------- BetaBinomial

std::vector<double> bmsb_z_log_weights(const GibbsState& state, std::size_t j) {
  const LengthPrefix& p = state.prefix;
  const int N = state.model.trans.N;
  if (j == 0 || j > p.size()) throw std::out_of_range("z index out of range");
  std::vector<double> lw(static_cast<std::size_t>(N) + 1);
  const double u = upsilon(j, p.values[j - 1], state.model.marg);
  if (j == p.size()) {
    // Pending latent: prior-forward Bin(N, Upsilon_j(v_j)).
    for (int z = 0; z <= N; ++z)
      lw[z] = log_binomial_coefficient(N, z) + xlogy(z, u) + xlog1my(N - z, u);
    return lw;
  }
  const double vn = p.values[j];
  const BetaParams pn = state.model.marg.at(j + 1);
  for (int z = 0; z <= N; ++z) {
    lw[z] = log_binomial_coefficient(N, z) + xlogy(z, u) + xlogy(z, vn) + xlog1my(N - z, u) + xlog1my(N - z, vn) -
            log_rising_factorial(pn.alpha, z) - log_rising_factorial(pn.beta, N - z);
  }
  return lw;
}

void bmsb_update_z(GibbsState& state, Rng& rng) {
  LengthPrefix& p = state.prefix;
  const int N = state.model.trans.N;
  p.z.resize(p.size(), 0);
  if (N == 0) {
    std::fill(p.z.begin(), p.z.end(), 0);
    return;
  }
  for (std::size_t j = 1; j <= p.size(); ++j) {
    const auto lw = bmsb_z_log_weights(state, j);
    p.z[j - 1] = static_cast<int>(sample_categorical_log(rng, lw));
  }
}

double bmsb_v_log_density(const GibbsState& state, std::size_t j, double v) {
  if (!(v > 0.0 && v < 1.0)) return kNegInf;
  const LengthPrefix& p = state.prefix;
  const int N = state.model.trans.N;
  const BetaParams pj = state.model.marg.at(j);
  const double ap = pj.alpha + (j > 1 ? p.z[j - 2] : 0);
  const double bp = pj.beta + (j > 1 ? N - p.z[j - 2] : 0);
  double ld = (ap + state.a(j) - 1.0) * std::log(v) + (bp + state.b(j) - 1.0) * std::log1p(-v);
  const int z = p.z[j - 1];
  if (N > 0) {
    const double u = upsilon(j, v, state.model.marg);
    ld += xlogy(z, u) + xlog1my(N - z, u);
  }
  return ld;
}

void bmsb_update_v(GibbsState& state, Rng& rng) {
  LengthPrefix& p = state.prefix;
  const int N = state.model.trans.N;
  const bool exact = N == 0 || state.model.marg.stationary();
  for (std::size_t j = 1; j <= p.size(); ++j) {
    if (exact) {
      const BetaParams pj = state.model.marg.at(j);
      const int zp = j > 1 ? p.z[j - 2] : 0;
      const double ap = pj.alpha + (j > 1 ? zp : 0) + state.a(j) + (N > 0 ? p.z[j - 1] : 0);
      const double bp = pj.beta + (j > 1 ? N - zp : 0) + state.b(j) + (N > 0 ? N - p.z[j - 1] : 0);
      p.values[j - 1] = sample_beta(rng, ap, bp);
    } else {
      p.values[j - 1] = slice_sample_unit([&](double v) { return bmsb_v_log_density(state, j, v); },
                                          p.values[j - 1], 1, rng);
    }
  }
}

std::vector<double> bmsb_N_log_posterior(const GibbsState& state) {
  if (state.hyper_prior.kind != HyperPrior::Kind::DiscreteN) throw std::logic_error("N update requires a pmf prior");
  const LengthPrefix& p = state.prefix;
  const auto& pmf = state.hyper_prior.n_pmf;
  int zmax = 0;
  for (int z : p.z) zmax = std::max(zmax, z);
  std::vector<double> u(p.size());
  for (std::size_t j = 1; j <= p.size(); ++j) u[j - 1] = upsilon(j, p.values[j - 1], state.model.marg);
  std::vector<double> lp(pmf.size(), kNegInf);
  for (std::size_t n = static_cast<std::size_t>(zmax); n < pmf.size(); ++n) {
    if (!(pmf[n] > 0.0)) continue;
    const int N = static_cast<int>(n);
    double s = std::log(pmf[n]);
    for (std::size_t j = 1; j <= p.size(); ++j) {
      if (j > 1) {
        const BetaParams pj = state.model.marg.at(j);
        const int zp = p.z[j - 2];
        s += beta_log_pdf(p.values[j - 1], pj.alpha + zp, pj.beta + (N - zp));
      }
      const int z = p.z[j - 1];
      s += log_binomial_coefficient(N, z) + xlogy(z, u[j - 1]) + xlog1my(N - z, u[j - 1]);
    }
    lp[n] = s;
  }
  return lp;
}

void bmsb_update_N(GibbsState& state, Rng& rng) {
  const auto lp = bmsb_N_log_posterior(state);
  state.model.trans.N = static_cast<int>(sample_categorical_log(rng, lp));
}

// ---------------------------------------------------------------- Lazy

namespace {

// Founder position (1-based) of the segment containing j.
std::size_t founder_of(const LengthPrefix& p, std::size_t j) {
  while (j > 1 && !p.fresh[j - 1]) --j;
  return j;
}

void refresh_segment(GibbsState& state, std::size_t t) {
  LengthPrefix& p = state.prefix;
  for (std::size_t l = t + 1; l <= p.size() && !p.fresh[l - 1]; ++l)
    p.values[l - 1] = upsilon(l - 1, p.values[l - 2], state.model.marg);
}

}  // namespace

void lmsb_refresh_copies(GibbsState& state) {
  LengthPrefix& p = state.prefix;
  if (p.fresh.empty()) return;
  p.fresh[0] = 1;
  for (std::size_t t = 1; t <= p.size(); ++t)
    if (p.fresh[t - 1]) refresh_segment(state, t);
}

LazyConditional lmsb_conditional(const GibbsState& state, std::size_t j) {
  const LengthPrefix& p = state.prefix;
  const std::size_t m = p.size();
  if (j == 0 || j > m) throw std::out_of_range("lazy index out of range");
  const double rho = state.model.trans.rho;
  const int a = state.a(j);
  const int b = state.b(j);
  const BetaParams pj = state.model.marg.at(j);
  LazyConditional c;
  c.fresh_alpha = pj.alpha + a;
  c.fresh_beta = pj.beta + b;
  const bool has_left = j > 1;
  const bool has_right = j < m;
  if (has_left) c.left_value = upsilon(j - 1, p.values[j - 2], state.model.marg);
  if (has_right) c.right_value = upsilon_inverse(j, p.values[j], state.model.marg);
  if (has_left && has_right && std::fabs(c.left_value - c.right_value) < kDeltaTieTolerance) {
    c.degenerate = true;
    c.w_left = 1.0;
    return c;
  }
  if (!has_left && !has_right) {
    c.w_fresh = 1.0;
    return c;
  }
  const double log_rho = std::log(rho);
  std::vector<double> lw(3, kNegInf);
  if (has_left && rho > 0.0) lw[0] = log_rho + log_lik(a, b, c.left_value);
  if (has_right && rho > 0.0) lw[1] = log_rho + log_lik(a, b, c.right_value);
  if (rho < 1.0) lw[2] = std::log1p(-rho) + log_beta_moment(pj.alpha, pj.beta, a, b);
  const double norm = log_sum_exp(lw);
  if (norm == kNegInf) throw std::logic_error("lazy conditional has no mass; state has zero probability");
  c.w_left = std::exp(lw[0] - norm);
  c.w_right = std::exp(lw[1] - norm);
  c.w_fresh = std::exp(lw[2] - norm);
  return c;
}

namespace {

// Samples the flags of v_j and v_{j+1}; copies downstream of j are left stale.
void lazy_step(GibbsState& state, std::size_t j, Rng& rng) {
  LengthPrefix& p = state.prefix;
  const std::size_t m = p.size();
  const LazyConditional c = lmsb_conditional(state, j);
  const bool has_right = j < m;
  int choice;
  if (c.degenerate) {
    choice = 3;
  } else {
    const double w[3] = {c.w_left, c.w_right, c.w_fresh};
    choice = static_cast<int>(sample_categorical(rng, w));
  }
  switch (choice) {
    case 0:  // copy of the left neighbour
      p.fresh[j - 1] = 0;
      if (has_right) p.fresh[j] = 1;
      break;
    case 1:  // the right neighbour copies v_j
      p.values[j - 1] = c.right_value;
      p.fresh[j - 1] = 1;
      p.fresh[j] = 0;
      break;
    case 2:  // fresh draw
      p.values[j - 1] = sample_beta(rng, c.fresh_alpha, c.fresh_beta);
      p.fresh[j - 1] = 1;
      if (has_right) p.fresh[j] = 1;
      break;
    default:  // both neighbours chain through v_j
      p.fresh[j - 1] = 0;
      p.fresh[j] = 0;
      break;
  }
  p.fresh[0] = 1;
}

// Recomputes stale copies up to index k; values before *valid are current.
void refresh_through(GibbsState& state, std::size_t k, std::size_t* valid) {
  LengthPrefix& p = state.prefix;
  k = std::min(k, p.size());
  for (std::size_t l = std::max<std::size_t>(*valid + 1, 2); l <= k; ++l)
    if (!p.fresh[l - 1]) p.values[l - 1] = upsilon(l - 1, p.values[l - 2], state.model.marg);
  *valid = std::max(*valid, k);
}

void lmsb_sweep_flags(GibbsState& state, Rng& rng) {
  std::size_t valid = 1;
  for (std::size_t j = 1; j <= state.prefix.size(); ++j) {
    refresh_through(state, j + 1, &valid);
    lazy_step(state, j, rng);
    valid = j - 1;
  }
  refresh_through(state, state.prefix.size(), &valid);
}

}  // namespace

void lmsb_update_vj(GibbsState& state, std::size_t j, Rng& rng) {
  const bool has_right = j < state.prefix.size();
  lazy_step(state, j, rng);
  refresh_segment(state, founder_of(state.prefix, j));
  if (has_right && state.prefix.fresh[j]) refresh_segment(state, j + 1);
}

void lmsb_update_vstar_block(GibbsState& state, Rng& rng) {
  LengthPrefix& p = state.prefix;
  const std::size_t m = p.size();
  const bool stationary = state.model.marg.stationary();
  p.fresh[0] = 1;
  std::size_t t = 1;
  while (t <= m) {
    std::size_t e = t;
    while (e < m && !p.fresh[e]) ++e;  // segment is [t, e]
    const BetaParams pt = state.model.marg.at(t);
    if (stationary) {
      int A = 0, B = 0;
      for (std::size_t l = t; l <= e; ++l) {
        A += state.a(l);
        B += state.b(l);
      }
      p.values[t - 1] = sample_beta(rng, pt.alpha + A, pt.beta + B);
    } else {
      auto logd = [&](double v) {
        if (!(v > 0.0 && v < 1.0)) return kNegInf;
        double s = (pt.alpha - 1.0) * std::log(v) + (pt.beta - 1.0) * std::log1p(-v);
        double x = v;
        for (std::size_t l = t; l <= e; ++l) {
          if (l > t) x = upsilon(l - 1, x, state.model.marg);
          s += log_lik(state.a(l), state.b(l), x);
        }
        return s;
      };
      p.values[t - 1] = slice_sample_unit(logd, p.values[t - 1], 1, rng);
    }
    refresh_segment(state, t);
    t = e + 1;
  }
}

void lmsb_update_rho(GibbsState& state, Rng& rng) {
  if (state.hyper_prior.kind != HyperPrior::Kind::BetaRho) throw std::logic_error("rho update requires a Beta prior");
  const LengthPrefix& p = state.prefix;
  const double m = static_cast<double>(p.size());
  double r = 0.0;
  for (auto f : p.fresh) r += f ? 1.0 : 0.0;
  state.model.trans.rho = sample_beta(rng, state.hyper_prior.a + m - r, state.hyper_prior.b + r - 1.0);
}

// ---------------------------------------------------------------- Others

void independent_update_v(GibbsState& state, Rng& rng) {
  LengthPrefix& p = state.prefix;
  for (std::size_t j = 1; j <= p.size(); ++j) {
    const BetaParams pj = state.model.marg.at(j);
    p.values[j - 1] = sample_beta(rng, pj.alpha + state.a(j), pj.beta + state.b(j));
  }
}

void cd_update_v1(GibbsState& state, Rng& rng) {
  LengthPrefix& p = state.prefix;
  const std::size_t m = p.size();
  const BetaParams p1 = state.model.marg.at(1);
  if (state.model.marg.stationary()) {
    int A = 0, B = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      A += state.a(j);
      B += state.b(j);
    }
    const double v = sample_beta(rng, p1.alpha + A, p1.beta + B);
    std::fill(p.values.begin(), p.values.end(), v);
    return;
  }
  auto logd = [&](double v) {
    if (!(v > 0.0 && v < 1.0)) return kNegInf;
    double s = (p1.alpha - 1.0) * std::log(v) + (p1.beta - 1.0) * std::log1p(-v);
    double x = v;
    for (std::size_t j = 1; j <= m; ++j) {
      if (j > 1) x = upsilon(j - 1, x, state.model.marg);
      s += log_lik(state.a(j), state.b(j), x);
    }
    return s;
  };
  p.values[0] = slice_sample_unit(logd, p.values[0], 1, rng);
  for (std::size_t j = 2; j <= m; ++j) p.values[j - 1] = upsilon(j - 1, p.values[j - 2], state.model.marg);
}

void gibbs_sweep(GibbsState& state, Rng& rng) {
  if (state.prefix.size() < std::max<std::size_t>(state.stats.kappa, 1)) resize_prefix(state, state.stats.kappa, rng);
  switch (state.model.trans.family) {
    case TransitionSpec::Family::Independent:
      independent_update_v(state, rng);
      break;
    case TransitionSpec::Family::CompletelyDependent:
      cd_update_v1(state, rng);
      break;
    case TransitionSpec::Family::BetaBinomial:
      bmsb_update_z(state, rng);
      bmsb_update_v(state, rng);
      if (state.hyper_prior.kind == HyperPrior::Kind::DiscreteN) bmsb_update_N(state, rng);
      break;
    case TransitionSpec::Family::Lazy:
      lmsb_sweep_flags(state, rng);
      lmsb_update_vstar_block(state, rng);
      if (state.hyper_prior.kind == HyperPrior::Kind::BetaRho) lmsb_update_rho(state, rng);
      break;
  }
}

double slice_sample_unit(const std::function<double(double)>& logdensity, double x0, int steps, Rng& rng,
                         double width) {
  if (!(x0 > 0.0 && x0 < 1.0)) throw std::invalid_argument("slice sampler start must lie in (0, 1)");
  double fx = logdensity(x0);
  if (!std::isfinite(fx)) throw std::invalid_argument("log density is not finite at the start point");
  double x = x0;
  constexpr int kMaxStepOut = 32;
  for (int s = 0; s < steps; ++s) {
    const double level = fx + std::log(rng.uniform());
    double lo = x - width * rng.uniform();
    double hi = lo + width;
    int budget = kMaxStepOut;
    while (lo > 0.0 && budget-- > 0 && logdensity(lo) > level) lo -= width;
    budget = kMaxStepOut;
    while (hi < 1.0 && budget-- > 0 && logdensity(hi) > level) hi += width;
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    for (;;) {
      const double cand = lo + rng.uniform() * (hi - lo);
      if (cand <= 0.0 || cand >= 1.0) {
        // Only possible through rounding at the support boundary.
        if (cand <= 0.0) lo = cand; else hi = cand;
        continue;
      }
      const double fc = logdensity(cand);
      if (fc > level) {
        x = cand;
        fx = fc;
        break;
      }
      if (cand < x) lo = cand; else hi = cand;
      if (hi - lo < 1e-300) break;
    }
  }
  return x;
}

}  // namespace msbp
