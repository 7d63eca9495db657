// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace msbp {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MSBP_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<MomentAccumulator> mc_accumulate(std::uint64_t reps, const Rng& base, int threads,
                                             std::size_t dim,
                                             const std::function<void(Rng&, std::span<double>)>& draw) {
  const std::uint64_t blocks = (reps + kReplicateBlock - 1) / kReplicateBlock;
  std::vector<std::vector<MomentAccumulator>> partial(blocks, std::vector<MomentAccumulator>(dim));
  parallel_for(blocks, threads, [&](std::size_t b) {
    Rng rng = base.split(b);
    std::vector<double> out(dim);
    const std::uint64_t begin = b * kReplicateBlock;
    const std::uint64_t end = std::min(reps, begin + kReplicateBlock);
    for (std::uint64_t r = begin; r < end; ++r) {
      std::fill(out.begin(), out.end(), 0.0);
      draw(rng, out);
      for (std::size_t k = 0; k < dim; ++k) partial[b][k].add(out[k]);
    }
  });
  std::vector<MomentAccumulator> total(dim);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < dim; ++k) total[k].merge(p[k]);
  return total;
}

Estimate mc_estimate(std::uint64_t reps, const Rng& base, int threads,
                     const std::function<double(Rng&)>& draw) {
  auto acc = mc_accumulate(reps, base, threads, 1, [&](Rng& rng, std::span<double> out) { out[0] = draw(rng); });
  return acc[0].estimate();
}

}  // namespace msbp
