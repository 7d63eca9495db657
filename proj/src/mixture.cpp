// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "msbp/kernels.hpp"

namespace msbp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kTailRatio = 1e-10;
constexpr int kMaxRejections = 10000;

double gaussian_logpdf(double y, const Atom& atom) {
  const double d = y - atom.mean;
  return 0.5 * std::log(atom.precision) - kHalfLog2Pi - 0.5 * atom.precision * d * d;
}

Atom draw_atom(const NormalGamma& post, Rng& rng) {
  Atom a;
  a.precision = sample_gamma(rng, post.a0) / post.b0;
  a.precision = std::max(a.precision, std::numeric_limits<double>::min());
  a.mean = post.mu0 + sample_normal(rng) / std::sqrt(post.lambda0 * a.precision);
  return a;
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Appends weights for length values the prefix gained since the last sync.
void sync_weights(OasState& s) {
  const auto& v = s.gibbs.prefix.values;
  for (std::size_t l = s.weights.size(); l < v.size(); ++l) s.weights.push(v[l]);
}

void grow(OasState& s, Rng& rng) {
  const std::size_t m = s.gibbs.prefix.size();
  const std::size_t target = std::max<std::size_t>(2 * m, 8);
  if (m >= kDefaultExtensionCap) throw TruncationError(1.0 - s.weights.remaining, m);
  extend_prefix(s.gibbs.prefix, s.gibbs.model, std::min(target, kDefaultExtensionCap), rng);
  sync_weights(s);
}

// Mass of the sticks not in `taken`, including the unrealized remainder.
double unpicked_mass(const OasState& s, const std::vector<char>& taken) {
  double acc = s.weights.remaining;
  for (std::size_t l = 0; l < s.weights.size(); ++l)
    if (!(l < taken.size() && taken[l])) acc += s.weights.weights[l];
  return acc;
}

// Draws a stick index proportional to w_l among those not taken.
std::size_t pick_unpicked(OasState& s, const std::vector<char>& taken, Rng& rng) {
  double r = rng.uniform() * unpicked_mass(s, taken);
  std::size_t last_free = 0;
  for (std::size_t l = 1;; ++l) {
    if (l > s.weights.size()) {
      if (r > s.weights.remaining && last_free != 0) return last_free;  // rounding residue
      grow(s, rng);
    }
    if (l - 1 < taken.size() && taken[l - 1]) continue;
    last_free = l;
    r -= s.weights.weights[l - 1];
    if (r <= 0.0) return l;
  }
}

void mark(std::vector<char>& taken, std::size_t l, char value) {
  if (taken.size() < l) taken.resize(l, 0);
  taken[l - 1] = value;
}

// Relabels blocks to least-element order and permutes the block data alike.
template <typename... Vecs>
void canonicalize(std::vector<int>& d, std::vector<int>& count, Vecs&... blocks) {
  const std::size_t K = count.size();
  std::vector<int> relabel(K + 1, 0);
  int next = 0;
  for (int& di : d) {
    if (relabel[di] == 0) relabel[di] = ++next;
    di = relabel[di];
  }
  auto permute = [&](auto& vec) {
    auto old = vec;
    for (std::size_t k = 1; k <= K; ++k) vec[relabel[k] - 1] = old[k - 1];
  };
  permute(count);
  (permute(blocks), ...);
}

// Step 1: reassign each allocation among the existing blocks or a new one.
void update_allocations(OasState& s, const MixtureSpec& spec, Rng& rng) {
  const auto& y = spec.data;
  const std::size_t n = y.size();
  std::vector<int> count(s.num_blocks(), 0);
  for (int di : s.d) ++count[di - 1];
  std::vector<char> taken;
  for (std::size_t l : s.rho_map) mark(taken, l, 1);

  std::vector<double> lw;
  for (std::size_t i = 0; i < n; ++i) {
    const int k = s.d[i];
    if (--count[k - 1] == 0) {
      mark(taken, s.rho_map[k - 1], 0);
      count.erase(count.begin() + (k - 1));
      s.rho_map.erase(s.rho_map.begin() + (k - 1));
      s.atoms.erase(s.atoms.begin() + (k - 1));
      for (int& dj : s.d)
        if (dj > k) --dj;
    }
    const std::size_t K = count.size();
    lw.assign(K + 1, kNegInf);
    for (std::size_t j = 0; j < K; ++j) {
      const double w = s.weights.weights[s.rho_map[j] - 1];
      if (w > 0.0) lw[j] = std::log(w) + gaussian_logpdf(y[i], s.atoms[j]);
    }
    const double free_mass = unpicked_mass(s, taken);
    if (free_mass > 0.0) lw[K] = std::log(free_mass) + spec.base.predictive_logpdf(y[i]);
    const std::size_t c = sample_categorical_log(rng, lw);
    if (c < K) {
      s.d[i] = static_cast<int>(c) + 1;
      ++count[c];
      continue;
    }
    const std::size_t l = pick_unpicked(s, taken, rng);
    mark(taken, l, 1);
    s.rho_map.push_back(l);
    s.atoms.push_back(draw_atom(spec.base.posterior(1, y[i], y[i] * y[i]), rng));
    count.push_back(1);
    s.d[i] = static_cast<int>(K) + 1;
  }
  canonicalize(s.d, count, s.rho_map, s.atoms);
}

// Index l among the free sticks with probability prop. to w_l^{n}: proposals
// prop. to w_l are accepted with probability (w_l / W)^{n - 1}, where W bounds
// every free weight, realized or not.
std::optional<std::size_t> pick_unpicked_power(OasState& s, const std::vector<char>& taken, double n, Rng& rng) {
  if (n == 1.0) return pick_unpicked(s, taken, rng);
  double bound = s.weights.remaining;
  for (std::size_t l = 0; l < s.weights.size(); ++l)
    if (!(l < taken.size() && taken[l])) bound = std::max(bound, s.weights.weights[l]);
  if (!(bound > 0.0)) return std::nullopt;
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const std::size_t l = pick_unpicked(s, taken, rng);
    const double w = s.weights.weights[l - 1];
    if (w > 0.0 && std::log(rng.uniform()) < (n - 1.0) * (std::log(w) - std::log(bound))) return l;
  }
  return std::nullopt;
}

// Step 2: each block's stick index given the others, prop. to w_l^{n_j}.
void update_stick_indices(OasState& s, Rng& rng) {
  const std::size_t K = s.num_blocks();
  std::vector<int> count(K, 0);
  for (int di : s.d) ++count[di - 1];
  std::vector<char> taken;
  for (std::size_t l : s.rho_map) mark(taken, l, 1);
  std::vector<double> lw;
  for (std::size_t j = 0; j < K; ++j) {
    mark(taken, s.rho_map[j], 0);
    const double nj = count[j];
    if (const auto l = pick_unpicked_power(s, taken, nj, rng)) {
      s.rho_map[j] = *l;
      mark(taken, *l, 1);
      continue;
    }
    // Rejection stalled: enumerate until the tail is negligible.
    for (;;) {
      const std::size_t m = s.weights.size();
      lw.assign(m, kNegInf);
      for (std::size_t l = 0; l < m; ++l) {
        if (l < taken.size() && taken[l]) continue;
        const double w = s.weights.weights[l];
        if (w > 0.0) lw[l] = nj * std::log(w);
      }
      const double log_z = log_sum_exp(lw);
      // sum_{l > m} w_l^{n_j} <= remaining^{n_j}
      if (nj * s.weights.log_remaining < std::log(kTailRatio) + log_z) break;
      grow(s, rng);
    }
    const std::size_t l = sample_categorical_log(rng, lw) + 1;
    s.rho_map[j] = l;
    mark(taken, l, 1);
  }
}

// Step 3: conjugate atom updates.
void update_atoms(OasState& s, const MixtureSpec& spec, Rng& rng) {
  const std::size_t K = s.num_blocks();
  std::vector<std::vector<double>> members(K);
  for (std::size_t i = 0; i < s.d.size(); ++i) members[s.d[i] - 1].push_back(spec.data[i]);
  for (std::size_t j = 0; j < K; ++j) s.atoms[j] = draw_atom(spec.base.posterior(members[j]), rng);
}

// Step 4: length variables (and hyperparameters) given a_j = sum_l n_l 1{rho_l = j}.
void update_lengths(OasState& s, Rng& rng) {
  std::size_t kappa = 0;
  for (std::size_t l : s.rho_map) kappa = std::max(kappa, l);
  std::vector<int> a(kappa, 0);
  for (int di : s.d) a[s.rho_map[di - 1] - 1] += 1;
  s.gibbs.stats = AllocationStats::from_counts(std::move(a));
  resize_prefix(s.gibbs, kappa, rng);
  gibbs_sweep(s.gibbs, rng);
  s.weights = stick_break(s.gibbs.prefix);
}

}  // namespace

void NormalGamma::validate() const {
  if (!std::isfinite(mu0)) throw std::invalid_argument("mu0 must be finite");
  if (!(lambda0 > 0.0) || !(a0 > 0.0) || !(b0 > 0.0) || !std::isfinite(lambda0) || !std::isfinite(a0) ||
      !std::isfinite(b0))
    throw std::invalid_argument("lambda0, a0 and b0 must be positive");
}

NormalGamma NormalGamma::posterior(std::size_t n, double sum, double sum_sq) const {
  if (n == 0) return *this;
  const double nn = static_cast<double>(n);
  const double ybar = sum / nn;
  const double ss = std::max(0.0, sum_sq - nn * ybar * ybar);
  NormalGamma p;
  p.lambda0 = lambda0 + nn;
  p.mu0 = (lambda0 * mu0 + sum) / p.lambda0;
  p.a0 = a0 + 0.5 * nn;
  p.b0 = b0 + 0.5 * ss + 0.5 * lambda0 * nn * (ybar - mu0) * (ybar - mu0) / p.lambda0;
  return p;
}

NormalGamma NormalGamma::posterior(const std::vector<double>& ys) const {
  if (ys.empty()) return *this;
  double sum = 0.0;
  for (double y : ys) sum += y;
  const double ybar = sum / static_cast<double>(ys.size());
  double ss = 0.0;
  for (double y : ys) ss += (y - ybar) * (y - ybar);
  // Feed the centred sum of squares through the streaming form.
  return posterior(ys.size(), sum, ss + static_cast<double>(ys.size()) * ybar * ybar);
}

double NormalGamma::predictive_logpdf(double y) const {
  const double nu = 2.0 * a0;
  const double scale2 = b0 * (1.0 + lambda0) / (a0 * lambda0);
  const double t = (y - mu0) * (y - mu0) / (nu * scale2);
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi * scale2) -
         0.5 * (nu + 1.0) * std::log1p(t);
}

void OasState::check_invariants() const {
  const std::size_t K = num_blocks();
  if (atoms.size() != K) throw std::logic_error("atoms and stick indices disagree in length");
  int seen = 0;
  for (int di : d) {
    if (di < 1 || di > static_cast<int>(K)) throw std::logic_error("allocation label out of range");
    if (di > seen + 1) throw std::logic_error("blocks are not in least-element order");
    seen = std::max(seen, di);
  }
  if (seen != static_cast<int>(K)) throw std::logic_error("empty block");
  std::vector<std::size_t> sorted = rho_map;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::logic_error("stick indices are not distinct");
  if (!sorted.empty() && (sorted.front() < 1 || sorted.back() > weights.size()))
    throw std::logic_error("stick index beyond the realized prefix");
  if (weights.size() != gibbs.prefix.size()) throw std::logic_error("weights out of sync with the prefix");
}

OasState oas_init(const MixtureSpec& spec, Rng& rng) {
  spec.base.validate();
  OasState s;
  s.gibbs.model = spec.model;
  s.gibbs.hyper_prior = spec.hyper_prior;
  s.gibbs.prefix = sample_prefix(spec.model, 1, rng);
  sync_weights(s);
  if (spec.data.empty()) return s;
  s.d.assign(spec.data.size(), 1);
  const std::vector<char> none;
  s.rho_map.push_back(pick_unpicked(s, none, rng));
  s.atoms.push_back(draw_atom(spec.base.posterior(spec.data), rng));
  return s;
}

void oas_sweep(OasState& state, const MixtureSpec& spec, Rng& rng) {
  if (state.d.size() != spec.data.size()) throw std::invalid_argument("state and data sizes differ");
  sync_weights(state);
  if (!spec.data.empty()) {
    update_allocations(state, spec, rng);
    update_stick_indices(state, rng);
    update_atoms(state, spec, rng);
  }
  update_lengths(state, rng);
}

std::vector<OasState> fit(const MixtureSpec& spec, std::size_t iters, std::size_t burnin, std::size_t thin, Rng& rng) {
  if (!(iters > burnin)) throw std::invalid_argument("iterations must exceed burn-in");
  if (thin == 0) throw std::invalid_argument("thinning must be positive");
  OasState s = oas_init(spec, rng);
  std::vector<OasState> draws;
  draws.reserve((iters - burnin) / thin);
  for (std::size_t it = 1; it <= iters; ++it) {
    oas_sweep(s, spec, rng);
    if (it > burnin && (it - burnin) % thin == 0) draws.push_back(s);
  }
  return draws;
}

DensityEstimate density_estimate(const std::vector<OasState>& draws, const MixtureSpec& spec,
                                 const std::vector<double>& grid) {
  if (draws.empty()) throw std::invalid_argument("density estimate needs at least one draw");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid must be increasing");
  std::vector<double> predictive(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) predictive[i] = std::exp(spec.base.predictive_logpdf(grid[i]));
  DensityEstimate out{grid, std::vector<double>(grid.size(), 0.0)};
  const double scale = 1.0 / static_cast<double>(draws.size());
  for (const OasState& s : draws) {
    double allocated = 0.0;
    for (std::size_t j = 1; j <= s.num_blocks(); ++j) {
      const double w = s.block_weight(j);
      allocated += w;
      kernels::add_gaussian(grid, s.atoms[j - 1].mean, s.atoms[j - 1].precision, w * scale, out.values);
    }
    const double rest = std::max(0.0, 1.0 - allocated) * scale;
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] += rest * predictive[i];
  }
  return out;
}

double tv_distance(const DensityEstimate& f, const DensityEstimate& g) {
  if (f.grid != g.grid) throw std::invalid_argument("densities are on different grids");
  if (f.values.size() != f.grid.size() || g.values.size() != g.grid.size())
    throw std::invalid_argument("density values do not match the grid");
  return std::clamp(0.5 * kernels::trapezoid_abs_diff(f.grid, f.values, g.values), 0.0, 1.0);
}

std::vector<double> posterior_Kn(const std::vector<OasState>& draws) {
  if (draws.empty()) throw std::invalid_argument("posterior_Kn needs at least one draw");
  std::size_t kmax = 0;
  for (const auto& s : draws) kmax = std::max(kmax, s.num_blocks());
  std::vector<double> pmf(kmax + 1, 0.0);
  for (const auto& s : draws) pmf[s.num_blocks()] += 1.0;
  for (double& p : pmf) p /= static_cast<double>(draws.size());
  return pmf;
}

std::vector<int> binder_cluster_estimate(const std::vector<std::vector<int>>& partitions) {
  if (partitions.empty()) throw std::invalid_argument("binder estimate needs at least one partition");
  const std::size_t n = partitions.front().size();
  for (const auto& p : partitions)
    if (p.size() != n) throw std::invalid_argument("partitions have different sizes");
  std::vector<double> co(n * n, 0.0);
  for (const auto& p : partitions)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k)
        if (p[i] == p[k]) co[i * n + k] += 1.0;
  for (double& c : co) c /= static_cast<double>(partitions.size());
  double best = std::numeric_limits<double>::infinity();
  const std::vector<int>* arg = nullptr;
  for (const auto& p : partitions) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k) loss += std::fabs((p[i] == p[k] ? 1.0 : 0.0) - co[i * n + k]);
    if (loss < best) {
      best = loss;
      arg = &p;
    }
  }
  // Least-element labels.
  std::vector<int> out(n);
  std::vector<std::pair<int, int>> map;
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int lab = (*arg)[i];
    auto it = std::find_if(map.begin(), map.end(), [&](const auto& e) { return e.first == lab; });
    if (it == map.end()) {
      map.emplace_back(lab, ++next);
      out[i] = next;
    } else {
      out[i] = it->second;
    }
  }
  return out;
}

std::vector<int> binder_cluster_estimate(const std::vector<OasState>& draws) {
  std::vector<std::vector<int>> parts;
  parts.reserve(draws.size());
  for (const auto& s : draws) parts.push_back(s.d);
  return binder_cluster_estimate(parts);
}

void GaussianMixture::validate() const {
  if (weights.empty() || weights.size() != means.size() || weights.size() != sds.size())
    throw std::invalid_argument("mixture components need matching weights, means and sds");
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (!(weights[j] >= 0.0) || !(sds[j] > 0.0) || !std::isfinite(means[j]))
      throw std::invalid_argument("invalid mixture component");
}

std::vector<double> GaussianMixture::sample(std::size_t n, Rng& rng) const {
  validate();
  std::vector<double> y(n);
  for (auto& yi : y) {
    const std::size_t c = sample_categorical(rng, weights);
    yi = means[c] + sds[c] * sample_normal(rng);
  }
  return y;
}

DensityEstimate GaussianMixture::density(const std::vector<double>& grid) const {
  validate();
  double total = 0.0;
  for (double w : weights) total += w;
  DensityEstimate out{grid, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t j = 0; j < weights.size(); ++j)
    kernels::add_gaussian(grid, means[j], 1.0 / (sds[j] * sds[j]), weights[j] / total, out.values);
  return out;
}

GaussianMixture eight_gaussian_benchmark() {
  GaussianMixture g;
  g.means = {-13.1, -7.2, -5.5, -2.7, 2.2, 4.3, 8.9, 9.7};
  g.sds = {1.0, 0.5, 0.3, 1.3, 0.5, 0.5, 0.9, 0.4};
  double total = 0.0;
  for (int j = 0; j < 8; ++j) {
    g.weights.push_back(0.1 * std::pow(0.9, j));
    total += g.weights.back();
  }
  for (double& w : g.weights) w /= total;
  return g;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw std::invalid_argument("grid needs hi > lo and at least two points");
  std::vector<double> g(points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + h * static_cast<double>(i);
  g.back() = hi;
  return g;
}

}  // namespace msbp
