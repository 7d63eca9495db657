// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace msbp {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  __extension__ using u128 = unsigned __int128;
  const u128 p = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::array<std::uint64_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

Rng::result_type Rng::operator()() {
  if (pos_ == 4) {
    buffer_ = philox4x64(counter_, key_);
    if (++counter_[0] == 0) ++counter_[1];
    pos_ = 0;
  }
  return buffer_[pos_++];
}

double Rng::uniform() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

Rng Rng::split(std::uint64_t index) const {
  return Rng(key_[0], splitmix64(key_[1] ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

double sample_normal(Rng& rng) {
  // Marsaglia polar method; the second variate is discarded to keep the
  // generator stateless beyond its counter.
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

namespace {

// Marsaglia & Tsang (2000), valid for shape >= 1.
double log_gamma_mt(Rng& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return std::log(d) + std::log(v);
  }
}

}  // namespace

double sample_log_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw std::domain_error("gamma shape must be positive and finite");
  if (shape >= 1.0) return log_gamma_mt(rng, shape);
  // G(a) = G(a + 1) * U^{1/a}
  const double lg = log_gamma_mt(rng, shape + 1.0);
  return lg + std::log(rng.uniform()) / shape;
}

double sample_gamma(Rng& rng, double shape) { return std::exp(sample_log_gamma(rng, shape)); }

double sample_beta(Rng& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("beta parameters must be positive and finite");
  const double la = sample_log_gamma(rng, a);
  const double lb = sample_log_gamma(rng, b);
  // x = Ga / (Ga + Gb) evaluated without forming the gammas.
  const double diff = lb - la;
  if (diff > 0.0) {
    const double e = std::exp(-diff);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(diff));
}

int sample_binomial(Rng& rng, int n, double p) {
  if (n < 0) throw std::domain_error("binomial size must be nonnegative");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
  const double q = 1.0 - p;
  if (n * p > 500.0) {
    std::binomial_distribution<int> dist(n, p);
    return dist(rng);
  }
  // Sequential inversion from k = 0.
  const double r = p / q;
  double f = std::pow(q, n);
  double u = rng.uniform();
  int k = 0;
  while (u > f && k < n) {
    u -= f;
    ++k;
    f *= r * static_cast<double>(n - k + 1) / static_cast<double>(k);
  }
  return k;
}

bool sample_bernoulli(Rng& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return rng.uniform() < p;
}

std::uint64_t sample_geometric(Rng& rng, double p) {
  if (!(p > 0.0)) throw std::domain_error("geometric success probability must be positive");
  if (p >= 1.0) return 1;
  const double g = std::ceil(std::log(rng.uniform()) / std::log1p(-p));
  if (!(g < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return g < 1.0 ? 1 : static_cast<std::uint64_t>(g);
}

std::size_t sample_categorical(Rng& rng, std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("categorical over an empty set");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0) || !std::isfinite(total)) throw std::invalid_argument("categorical weights must have positive finite sum");
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return weights.size() - 1;
}

std::size_t sample_categorical_log(Rng& rng, std::span<const double> log_weights) {
  if (log_weights.empty()) throw std::invalid_argument("categorical over an empty set");
  double mx = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) mx = std::max(mx, lw);
  if (!std::isfinite(mx)) throw std::invalid_argument("categorical log-weights are all -inf or non-finite");
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - mx);
  return sample_categorical(rng, w);
}

}  // namespace msbp
