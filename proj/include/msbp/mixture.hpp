// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_MIXTURE_HPP
#define MSBP_MIXTURE_HPP

#include <cstddef>
#include <vector>

#include "msbp/chains.hpp"
#include "msbp/gibbs.hpp"
#include "msbp/random.hpp"
#include "msbp/weights.hpp"

namespace msbp {

/// N(x1 | mu0, (lambda0 x2)^{-1}) Ga(x2 | a0, b0), Gamma in the rate form.
struct NormalGamma {
  double mu0 = 0.0;
  double lambda0 = 0.01;
  double a0 = 0.5;
  double b0 = 0.5;

  void validate() const;
  /// Parameters of the posterior after observing `ys`.
  NormalGamma posterior(const std::vector<double>& ys) const;
  NormalGamma posterior(std::size_t n, double sum, double sum_sq) const;
  /// Density of one observation with the atom integrated out (Student-t).
  double predictive_logpdf(double y) const;
};

struct MixtureSpec {
  MsbpModel model;
  NormalGamma base;
  std::vector<double> data;
  HyperPrior hyper_prior;
};

struct Atom {
  double mean = 0.0;
  double precision = 1.0;
};

/// Ordered allocation sampler state. Labels d are 1-based and blocks are in
/// least-element order; rho_map[j-1] is the 1-based stick index of block j.
struct OasState {
  std::vector<int> d;
  std::vector<std::size_t> rho_map;
  std::vector<Atom> atoms;
  GibbsState gibbs;
  WeightPrefix weights;  ///< stick-breaking weights of gibbs.prefix

  std::size_t num_blocks() const { return rho_map.size(); }
  /// w_{rho_j} of block j (1-based).
  double block_weight(std::size_t j) const { return weights.weights[rho_map[j - 1] - 1]; }
  /// Throws std::logic_error when the ordering, distinctness or size
  /// invariants are broken.
  void check_invariants() const;
};

/// One block, stick index drawn size-biased, atom from the block posterior.
/// Empty data gives zero blocks.
OasState oas_init(const MixtureSpec& spec, Rng& rng);
/// Allocations, stick indices, atoms and length variables in turn.
void oas_sweep(OasState& state, const MixtureSpec& spec, Rng& rng);

/// Snapshots after burn-in, every thin-th sweep.
std::vector<OasState> fit(const MixtureSpec& spec, std::size_t iters, std::size_t burnin, std::size_t thin, Rng& rng);

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
};

DensityEstimate density_estimate(const std::vector<OasState>& draws, const MixtureSpec& spec,
                                 const std::vector<double>& grid);
double tv_distance(const DensityEstimate& f, const DensityEstimate& g);
/// pmf[k] = fraction of draws with k blocks; pmf[0] = 0.
std::vector<double> posterior_Kn(const std::vector<OasState>& draws);
/// Visited partition minimizing the estimated Binder loss, as 1-based
/// least-element labels.
std::vector<int> binder_cluster_estimate(const std::vector<std::vector<int>>& partitions);
std::vector<int> binder_cluster_estimate(const std::vector<OasState>& draws);

/// Finite Gaussian mixture used as a ground truth.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sds;

  void validate() const;
  std::vector<double> sample(std::size_t n, Rng& rng) const;
  DensityEstimate density(const std::vector<double>& grid) const;
};

/// Eight components, weights proportional to 0.1 * 0.9^{j-1}.
GaussianMixture eight_gaussian_benchmark();
std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

}  // namespace msbp

#endif  // MSBP_MIXTURE_HPP
