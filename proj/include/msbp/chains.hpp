// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_CHAINS_HPP
#define MSBP_CHAINS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msbp/random.hpp"
#include "msbp/specfun.hpp"

namespace msbp {

struct TransitionSpec {
  enum class Family { Independent, CompletelyDependent, BetaBinomial, Lazy };

  Family family = Family::Independent;
  int N = 0;         ///< BetaBinomial only
  double rho = 0.0;  ///< Lazy only

  static TransitionSpec independent();
  static TransitionSpec completely_dependent();
  static TransitionSpec beta_binomial(int N);
  static TransitionSpec lazy(double rho);

  std::string describe() const;
};

struct MsbpModel {
  MarginalSeq marg;
  TransitionSpec trans;
  std::uint64_t seed = 0;
};

/// Finite realization v_1..v_m of the length chain with its latent record.
struct LengthPrefix {
  std::vector<double> values;
  /// BetaBinomial: z[j-1] = z_j ~ Bin(N, Upsilon_j(v_j)), drawn together with
  /// v_j so the chain can be extended; empty for other families.
  std::vector<int> z;
  /// Lazy: fresh[j-1] != 0 iff j is a breakpoint; empty for other families.
  std::vector<std::uint8_t> fresh;

  std::size_t size() const { return values.size(); }
  /// 1-based breakpoint indices t_1 = 1 < t_2 < ... (Lazy only).
  std::vector<std::size_t> breakpoints() const;
};

struct TransitionDraw {
  double v_next = 0.0;
  int z = 0;             ///< latent count (BetaBinomial)
  bool copied = false;   ///< delta component chosen (Lazy)
};

/// One draw from psi_j(v, .).
TransitionDraw transition_sample(const TransitionSpec& trans, const MarginalSeq& marg, std::size_t j, double v,
                                 Rng& rng);

LengthPrefix sample_prefix(const MsbpModel& model, std::size_t m, Rng& rng);

/// Continues the chain until prefix has length m (no-op when already longer).
void extend_prefix(LengthPrefix& prefix, const MsbpModel& model, std::size_t m, Rng& rng);

/// Draws z_j ~ Bin(N, Upsilon_j(v_j)) (the BetaBinomial auxiliary).
int draw_bb_latent(const MarginalSeq& marg, int N, std::size_t j, double v, Rng& rng);

/// KS distance between v_j over n_samples independent prefixes and Be(alpha_j, beta_j).
/// Prefix i uses rng.split(i).
double marginal_check(const MsbpModel& model, std::size_t j, std::size_t n_samples, const Rng& rng);

struct PropernessResult {
  std::optional<std::size_t> m_star;  ///< empty when max_m was reached first
  double remaining_mass = 1.0;
};

PropernessResult properness_diagnostic(const MsbpModel& model, double epsilon, std::size_t max_m, Rng& rng);

/// Sufficient BetaBinomial properness condition: partial sums of
/// alpha_j / (alpha_j + beta_j) up to `terms`, growing without bound when proper.
double mean_length_partial_sum(const MarginalSeq& marg, std::size_t terms);

}  // namespace msbp

#endif  // MSBP_CHAINS_HPP
