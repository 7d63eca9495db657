// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_MOMENTS_HPP
#define MSBP_MOMENTS_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "msbp/chains.hpp"

namespace msbp {

/// Counts a_j = #{i: d_i = j} and tail counts b_j = sum_{l>j} a_l, j = 1..kappa.
struct AllocationStats {
  std::vector<int> a;
  std::vector<int> b;
  std::size_t kappa = 0;

  /// kappa = a.size(); trailing zero counts are allowed.
  static AllocationStats from_counts(std::vector<int> a);
  /// From 1-based allocations d_i.
  static AllocationStats from_allocations(const std::vector<std::size_t>& d);
};

/// Thrown when an exact enumeration would exceed its size cap.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// E[prod v_j^{a_j} (1-v_j)^{b_j}] for the stationary BetaBinomial chain by
/// explicit enumeration of the (N+1)^kappa latent vectors (kappa <= 8, N <= 12).
double mixed_moment_bmsb_stationary(double alpha, double beta, int N, const AllocationStats& stats);
/// Same quantity via a transfer-matrix recursion over z, O(kappa (N+1)^2).
double mixed_moment_bmsb_transfer(double alpha, double beta, int N, const AllocationStats& stats);

/// E[prod v_j^{a_j} (1-v_j)^{b_j}] for the stationary lazy chain by
/// enumeration of the 2^{kappa-1} breakpoint vectors (kappa <= 20).
double mixed_moment_lmsb_stationary(double alpha, double beta, double rho, const AllocationStats& stats);
/// Same quantity via a recursion over the last breakpoint, O(kappa^2).
double mixed_moment_lmsb_recursive(double alpha, double beta, double rho, const AllocationStats& stats);

/// log prod v_j^{a_j} (1-v_j)^{b_j}; -inf on zero-probability allocations.
double allocation_logprob_given_v(const LengthPrefix& prefix, const AllocationStats& stats);

struct TieSeriesParams {
  enum class Family { BmsbStationary, LmsbStationary };
  Family family = Family::LmsbStationary;
  double alpha = 1.0;
  double beta = 1.0;
  int N = 0;
  double rho = 0.0;
};

struct TieSeriesResult {
  double value = 0.0;       ///< partial sum of E[w_j^2]
  double tail_bound = 1.0;  ///< upper bound on the omitted tail
  std::size_t terms = 0;    ///< number of terms summed
  bool converged = false;   ///< tail_bound <= target
};

inline constexpr std::size_t kMaxTieSeriesTerms = 1000;

/// tau_p = sum_j E[w_j^2] truncated after at most J terms (J <= 1000),
/// stopping early once the tail bound E[prod_{l<=j} (1-v_l)^2] drops to target.
TieSeriesResult tie_probability_series(const TieSeriesParams& params, std::size_t J, double tail_bound_target);

}  // namespace msbp

#endif  // MSBP_MOMENTS_HPP
