// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_WEIGHTS_HPP
#define MSBP_WEIGHTS_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msbp/chains.hpp"
#include "msbp/random.hpp"
#include "msbp/stats.hpp"

namespace msbp {

inline constexpr std::size_t kDefaultExtensionCap = 1000000;

struct WeightPrefix {
  std::vector<double> weights;
  double remaining = 1.0;      ///< running product of (1 - v_i)
  double log_remaining = 0.0;  ///< same product in log space; authoritative once remaining underflows

  std::size_t size() const { return weights.size(); }
  /// Appends the weight generated by length v.
  void push(double v);
};

/// Raised when an extension reaches its cap before the requested mass.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(double achieved_mass, std::size_t length);
  double achieved_mass() const { return achieved_mass_; }
  std::size_t length() const { return length_; }

 private:
  double achieved_mass_;
  std::size_t length_;
};

WeightPrefix stick_break(const LengthPrefix& prefix);

/// Jointly extended realization of the length chain and its weights.
/// The model must outlive the draw.
class StickBreakingDraw {
 public:
  StickBreakingDraw(const MsbpModel& model, Rng& rng, std::size_t cap = kDefaultExtensionCap);

  void extend_to(std::size_t m);
  /// Smallest J with w_1 + ... + w_J > u; extends as needed.
  std::size_t extend_until(double u);
  /// w_j for 1-based j, extending as needed.
  double weight(std::size_t j);

  const LengthPrefix& lengths() const { return lengths_; }
  const WeightPrefix& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }

 private:
  const MsbpModel* model_;
  Rng* rng_;
  std::size_t cap_;
  LengthPrefix lengths_;
  WeightPrefix weights_;
};

WeightPrefix extend_until(const MsbpModel& model, double u, Rng& rng, std::size_t cap = kDefaultExtensionCap);

struct SizeBiasedDraw {
  std::vector<std::size_t> indices;  ///< 1-based, pairwise distinct
  std::vector<double> picked;        ///< w at each index
  WeightPrefix prefix;
};

/// Next size-biased pick from `draw`, excluding already picked indices
/// (`taken` indexed by 1-based position, grown as needed).
std::size_t size_biased_pick(StickBreakingDraw& draw, std::vector<char>& taken, double picked_mass, Rng& rng);

SizeBiasedDraw size_biased_sample(const MsbpModel& model, std::size_t k, Rng& rng,
                                  std::size_t cap = kDefaultExtensionCap);

std::size_t sample_Kn(const MsbpModel& model, std::size_t n, Rng& rng);

/// Block-creation times 1 = c_1 < c_2 < ... <= n_max of the exchangeable
/// partition; K_n = #{i: c_i <= n}.
std::vector<std::size_t> sample_block_creation_times(const MsbpModel& model, std::size_t n_max, Rng& rng);

/// Replicate r uses base.split-derived sub-streams (see mc_estimate). A pick
/// beyond the extension cap counts as weight 0.
Estimate tie_probability_mc(const MsbpModel& model, std::uint64_t reps, const Rng& rng, int threads = 1);
Estimate eppf_mc(const MsbpModel& model, const std::vector<int>& composition, std::uint64_t reps, const Rng& rng,
                 int threads = 1);

double functional_covariance(double tau_p, double p0_A, double p0_B, double p0_AB);

Estimate prob_decreasing_mc(const MsbpModel& model, std::size_t j, std::uint64_t reps, const Rng& rng,
                            int threads = 1);
/// rho + (1 - rho) E[I_{c(v)}(alpha_{j+1}, beta_{j+1})], v ~ Be(alpha_j, beta_j),
/// c(v) = min(1, v / (1 - v)). Requires Upsilon_j(v) <= v (Pitman-Yor or
/// stationary marginals).
double prob_decreasing_lmsb(const MarginalSeq& marg, double rho, std::size_t j);
/// sum_z C(N,z) E[I_{c(v)}(alpha_{j+1}+z, beta_{j+1}+N-z) U^z (1-U)^{N-z}], U = Upsilon_j(v).
double prob_decreasing_bmsb(const MarginalSeq& marg, int N, std::size_t j);

}  // namespace msbp

#endif  // MSBP_WEIGHTS_HPP
