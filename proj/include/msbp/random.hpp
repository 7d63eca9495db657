// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_RANDOM_HPP
#define MSBP_RANDOM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace msbp {

/// Philox4x64-10 block function (Salmon et al. 2011).
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Counter-based random stream keyed by (seed, stream id).
///
/// Streams derived with split() are statistically independent of the parent
/// and of each other, so Monte Carlo replicates can be assigned fixed
/// sub-streams regardless of how they are scheduled across threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();

  /// Child stream; equal (parent, index) always yields the same child.
  Rng split(std::uint64_t index) const;

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream() const { return key_[1]; }

 private:
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{};
  std::array<std::uint64_t, 4> buffer_{};
  int pos_ = 4;
};

std::uint64_t splitmix64(std::uint64_t x);

double sample_normal(Rng& rng);
/// Gamma(shape, rate = 1).
double sample_gamma(Rng& rng, double shape);
/// log of a Gamma(shape, 1) variate; stays finite for very small shapes.
double sample_log_gamma(Rng& rng, double shape);
double sample_beta(Rng& rng, double a, double b);
int sample_binomial(Rng& rng, int n, double p);
bool sample_bernoulli(Rng& rng, double p);
/// Number of trials up to and including the first success, success prob p.
std::uint64_t sample_geometric(Rng& rng, double p);
/// Index drawn with probability proportional to weights (nonnegative).
std::size_t sample_categorical(Rng& rng, std::span<const double> weights);
/// Index drawn with probability proportional to exp(log_weights).
std::size_t sample_categorical_log(Rng& rng, std::span<const double> log_weights);

}  // namespace msbp

#endif  // MSBP_RANDOM_HPP
