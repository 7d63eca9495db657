// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_PARALLEL_HPP
#define MSBP_PARALLEL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "msbp/random.hpp"
#include "msbp/stats.hpp"

namespace msbp {

/// Replicates per sub-stream; fixed so results do not depend on thread count.
inline constexpr std::uint64_t kReplicateBlock = 1024;

/// requested > 0 wins, then MSBP_THREADS, then 1.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Mean of draw(rng) over reps replicates. Replicate block b uses
/// base.split(b) so the result is identical for every thread count.
Estimate mc_estimate(std::uint64_t reps, const Rng& base, int threads,
                     const std::function<double(Rng&)>& draw);

/// Vector-valued variant: draw fills `out` (size dim) for one replicate.
std::vector<MomentAccumulator> mc_accumulate(std::uint64_t reps, const Rng& base, int threads,
                                             std::size_t dim,
                                             const std::function<void(Rng&, std::span<double>)>& draw);

}  // namespace msbp

#endif  // MSBP_PARALLEL_HPP
