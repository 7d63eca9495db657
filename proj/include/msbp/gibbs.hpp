// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_GIBBS_HPP
#define MSBP_GIBBS_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "msbp/chains.hpp"
#include "msbp/moments.hpp"
#include "msbp/random.hpp"

namespace msbp {

/// Prior on the dependence parameter: none (fixed), a pmf over N = 0..N_max,
/// or Beta(a, b) on rho.
struct HyperPrior {
  enum class Kind { None, DiscreteN, BetaRho };
  Kind kind = Kind::None;
  std::vector<double> n_pmf;  ///< n_pmf[N] = prior mass of N
  double a = 1.0;
  double b = 1.0;

  static HyperPrior none() { return {}; }
  static HyperPrior discrete_n(std::vector<double> pmf);
  static HyperPrior uniform_n(int n_max);
  static HyperPrior beta_rho(double a, double b);
};

/// State of the length-variable layer. The current N or rho lives in
/// model.trans. For the lazy family, prefix.fresh is authoritative and copy
/// values are recomputed from their segment founder.
struct GibbsState {
  MsbpModel model;
  LengthPrefix prefix;
  AllocationStats stats;
  HyperPrior hyper_prior;

  int a(std::size_t j) const { return j <= stats.kappa ? stats.a[j - 1] : 0; }
  int b(std::size_t j) const { return j <= stats.kappa ? stats.b[j - 1] : 0; }
};

/// Shrinks or extends the prefix from the prior transition so that it has
/// length max(m, stats.kappa); shrinking drops the tail (and keeps a pending
/// BetaBinomial latent consistent).
void resize_prefix(GibbsState& state, std::size_t m, Rng& rng);

/// Log probabilities (unnormalized) of z_j = 0..N given the neighbours.
std::vector<double> bmsb_z_log_weights(const GibbsState& state, std::size_t j);
void bmsb_update_z(GibbsState& state, Rng& rng);
/// Log density of v_j's full conditional up to a constant.
double bmsb_v_log_density(const GibbsState& state, std::size_t j, double v);
void bmsb_update_v(GibbsState& state, Rng& rng);
/// Log posterior (unnormalized) of N over the prior support; -inf outside.
std::vector<double> bmsb_N_log_posterior(const GibbsState& state);
void bmsb_update_N(GibbsState& state, Rng& rng);

/// The three-component conditional of v_j under the lazy chain.
struct LazyConditional {
  double w_left = 0.0;   ///< v_j = Upsilon_{j-1}(v_{j-1})
  double w_right = 0.0;  ///< v_j = Upsilon_j^{-1}(v_{j+1})
  double w_fresh = 0.0;  ///< v_j ~ Be(alpha_j + a_j, beta_j + b_j)
  double left_value = 0.0;
  double right_value = 0.0;
  double fresh_alpha = 0.0;
  double fresh_beta = 0.0;
  bool degenerate = false;  ///< both deltas coincide; v_j is fixed
};

inline constexpr double kDeltaTieTolerance = 1e-12;

LazyConditional lmsb_conditional(const GibbsState& state, std::size_t j);
void lmsb_update_vj(GibbsState& state, std::size_t j, Rng& rng);
void lmsb_update_vstar_block(GibbsState& state, Rng& rng);
void lmsb_update_rho(GibbsState& state, Rng& rng);
/// Recomputes copy values from founders after the flags changed.
void lmsb_refresh_copies(GibbsState& state);

void independent_update_v(GibbsState& state, Rng& rng);
void cd_update_v1(GibbsState& state, Rng& rng);

/// One full sweep of the length layer for the model's family, including the
/// hyperparameter update when a prior is present.
void gibbs_sweep(GibbsState& state, Rng& rng);

/// Stepping-out and shrinkage slice sampler on (0, 1).
double slice_sample_unit(const std::function<double(double)>& logdensity, double x0, int steps, Rng& rng,
                         double width = 0.25);

}  // namespace msbp

#endif  // MSBP_GIBBS_HPP
