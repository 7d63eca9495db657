// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_SPECFUN_HPP
#define MSBP_SPECFUN_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace msbp {

struct BetaParams {
  double alpha;
  double beta;
  bool operator==(const BetaParams&) const = default;
};

/// Lower and upper regularized incomplete beta values, each accurate in
/// absolute terms and the smaller one also accurate in relative terms.
struct BetaTails {
  double lower;
  double upper;
};

struct InverseOptions {
  double tolerance = 1e-10;      ///< bound on |I_x(a,b) - p|
  double relative_step = 1e-14;  ///< Newton step size (in log coordinates) accepted as converged
  int max_iterations = 200;
};

double log_beta(double a, double b);
double log_rising_factorial(double x, unsigned n);
double rising_factorial(double x, unsigned n);
double log_binomial_coefficient(unsigned n, unsigned k);
double beta_log_pdf(double x, double a, double b);

/// I_x(a, b).
double reg_inc_beta(double x, double a, double b);
BetaTails reg_inc_beta_tails(double x, double a, double b);

/// x with I_x(a, b) = p.
double inv_reg_inc_beta(double p, double a, double b, const InverseOptions& opts = {});
/// x with 1 - I_x(a, b) = q; keeps full precision when q is tiny.
double inv_reg_inc_beta_upper(double q, double a, double b, const InverseOptions& opts = {});

/// Rule producing the Beta(alpha_j, beta_j) marginal of each length variable.
class MarginalSeq {
 public:
  struct PitmanYor {
    double sigma;
    double theta;
  };
  struct ConstBeta {
    double alpha;
    double beta;
  };
  struct BetaOneTheta {
    std::function<double(std::size_t)> beta;
  };
  struct PowerAlpha {
    double gamma;
  };
  /// head gives (alpha_j, beta_j) for j <= head.size(); tail(j) beyond it,
  /// or the last head entry repeated when tail is empty.
  struct ExplicitList {
    std::vector<BetaParams> head;
    std::function<BetaParams(std::size_t)> tail;
  };
  using Rule = std::variant<PitmanYor, ConstBeta, BetaOneTheta, PowerAlpha, ExplicitList>;

  /// Be(1, 1) at every index.
  MarginalSeq() : rule_(ConstBeta{1.0, 1.0}) {}

  static MarginalSeq pitman_yor(double sigma, double theta);
  static MarginalSeq const_beta(double alpha, double beta);
  static MarginalSeq beta_one_theta(std::function<double(std::size_t)> beta);
  static MarginalSeq power_alpha(double gamma);
  static MarginalSeq explicit_list(std::vector<BetaParams> head,
                                   std::function<BetaParams(std::size_t)> tail = {});

  /// Parameters of the j-th marginal, j >= 1. Throws std::domain_error when
  /// the rule produces a non-positive or non-finite parameter.
  BetaParams at(std::size_t j) const;

  /// True when every marginal is provably identical.
  bool stationary() const;

  const Rule& rule() const { return rule_; }
  std::string describe() const;

 private:
  explicit MarginalSeq(Rule rule) : rule_(std::move(rule)) {}
  Rule rule_;
};

/// F_j(v) = I_v(alpha_j, beta_j).
double marginal_cdf(const MarginalSeq& marg, std::size_t j, double v);

/// F_to^{-1}(F_from(v)) with a single inversion, exact when the two marginals
/// coincide.
double transport(const MarginalSeq& marg, std::size_t from, std::size_t to, double v,
                 const InverseOptions& opts = {});

/// Upsilon_j = F_{j+1}^{-1} o F_j.
double upsilon(std::size_t j, double v, const MarginalSeq& marg);
/// Upsilon_j^{-1} = F_j^{-1} o F_{j+1}.
double upsilon_inverse(std::size_t j, double v, const MarginalSeq& marg);
/// Upsilon^{[j]} = F_j^{-1} o F_1.
double upsilon_composed(std::size_t j, double v, const MarginalSeq& marg);

}  // namespace msbp

#endif  // MSBP_SPECFUN_HPP
