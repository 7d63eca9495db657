// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/moments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "msbp/parallel.hpp"
#include "msbp/weights.hpp"
#include "oracles.hpp"

namespace msbp {
namespace {

double mc_mixed_moment(const MsbpModel& model, const AllocationStats& s, std::uint64_t reps, const Rng& rng,
                       Estimate* out) {
  *out = mc_estimate(reps, rng, 2, [&](Rng& r) {
    const auto p = sample_prefix(model, s.kappa, r);
    double prod = 1.0;
    for (std::size_t j = 0; j < s.kappa; ++j)
      prod *= std::pow(p.values[j], s.a[j]) * std::pow(1.0 - p.values[j], s.b[j]);
    return prod;
  });
  return out->value;
}

TEST(AllocationStats, Construction) {
  const auto s = AllocationStats::from_allocations({1, 3, 3, 1, 2});
  EXPECT_EQ(s.kappa, 3u);
  EXPECT_EQ(s.a, (std::vector<int>{2, 1, 2}));
  EXPECT_EQ(s.b, (std::vector<int>{3, 2, 0}));
  EXPECT_THROW(AllocationStats::from_allocations({0, 1}), std::invalid_argument);
  EXPECT_THROW(AllocationStats::from_counts({1, -1}), std::invalid_argument);
  const auto t = AllocationStats::from_counts({0, 2, 0});
  EXPECT_EQ(t.b, (std::vector<int>{2, 0, 0}));
}

TEST(BmsbMoment, SingleTermReduction) {
  const auto s = AllocationStats::from_counts({3});
  AllocationStats t = s;
  t.b[0] = 2;
  EXPECT_NEAR(mixed_moment_bmsb_stationary(0.7, 2.5, 0, t), oracle::beta_moment(0.7, 2.5, 3, 2), 1e-14);
  EXPECT_NEAR(mixed_moment_bmsb_stationary(0.7, 2.5, 4, t), oracle::beta_moment(0.7, 2.5, 3, 2), 1e-14);
}

TEST(BmsbMoment, DoubleIntegralOracle) {
  const double al = 2.0, be = 3.0;
  const int N = 2;
  auto joint = [&](double v1, double v2) {
    double s = 0.0;
    for (int z = 0; z <= N; ++z)
      s += oracle::binomial_pmf(N, z, v1) * oracle::beta_pdf(v2, al + z, be + N - z);
    return oracle::beta_pdf(v1, al, be) * s;
  };
  struct Case {
    std::vector<int> a, b;
  };
  for (const auto& c : {Case{{2, 0}, {0, 0}}, Case{{1, 2}, {2, 0}}, Case{{0, 1}, {3, 0}}, Case{{3, 3}, {1, 2}}}) {
    AllocationStats s;
    s.a = c.a;
    s.b = c.b;
    s.kappa = 2;
    const double quad = oracle::integrate(
        [&](double v1) {
          return oracle::integrate(
              [&](double v2) {
                return joint(v1, v2) * std::pow(v1, c.a[0]) * std::pow(1 - v1, c.b[0]) * std::pow(v2, c.a[1]) *
                       std::pow(1 - v2, c.b[1]);
              },
              0.0, 1.0);
        },
        0.0, 1.0);
    EXPECT_NEAR(mixed_moment_bmsb_stationary(al, be, N, s), quad, 1e-6);
    EXPECT_NEAR(mixed_moment_bmsb_transfer(al, be, N, s), quad, 1e-6);
  }
}

TEST(BmsbMoment, TransferMatchesEnumeration) {
  Rng rng(1);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    std::vector<int> a(k);
    for (auto& x : a) x = static_cast<int>(rng.uniform() * 4);
    const auto s = AllocationStats::from_counts(a);
    const double al = 0.2 + 3 * rng.uniform(), be = 0.2 + 3 * rng.uniform();
    const int N = static_cast<int>(rng.uniform() * 8);
    const double e = mixed_moment_bmsb_stationary(al, be, N, s);
    EXPECT_NEAR(mixed_moment_bmsb_transfer(al, be, N, s) / e, 1.0, 1e-11);
  }
}

TEST(BmsbMoment, SizeCap) {
  const auto s = AllocationStats::from_counts(std::vector<int>(9, 1));
  EXPECT_THROW(mixed_moment_bmsb_stationary(1, 1, 2, s), SizeError);
  EXPECT_THROW(mixed_moment_bmsb_stationary(1, 1, 13, AllocationStats::from_counts({1})), SizeError);
  EXPECT_NO_THROW(mixed_moment_bmsb_transfer(1, 1, 20, s));
}

TEST(BmsbMoment, MonteCarlo) {
  AllocationStats s;
  s.a = {1, 1};
  s.b = {1, 0};
  s.kappa = 2;
  const MsbpModel model{MarginalSeq::const_beta(1, 1), TransitionSpec::beta_binomial(1), 0};
  Estimate e;
  mc_mixed_moment(model, s, 1000000, Rng(2), &e);
  EXPECT_NEAR(mixed_moment_bmsb_stationary(1, 1, 1, s), e.value, 3 * e.std_error);
}

TEST(LmsbMoment, Endpoints) {
  const auto s = AllocationStats::from_counts({2, 1, 3});
  const double al = 0.8, be = 1.7;
  double indep = 1.0;
  for (std::size_t j = 0; j < 3; ++j) indep *= oracle::beta_moment(al, be, s.a[j], s.b[j]);
  EXPECT_NEAR(mixed_moment_lmsb_stationary(al, be, 0.0, s), indep, 1e-14);
  EXPECT_NEAR(mixed_moment_lmsb_stationary(al, be, 1.0, s), oracle::beta_moment(al, be, 6, 4 + 3), 1e-14);
  EXPECT_NEAR(mixed_moment_lmsb_stationary(al, be, 1e-9, s), indep, 1e-6);
  EXPECT_NEAR(mixed_moment_lmsb_stationary(al, be, 1 - 1e-9, s), oracle::beta_moment(al, be, 6, 7), 1e-6);
}

TEST(LmsbMoment, RecursiveMatchesEnumeration) {
  Rng rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 12);
    std::vector<int> a(k);
    for (auto& x : a) x = static_cast<int>(rng.uniform() * 4);
    const auto s = AllocationStats::from_counts(a);
    const double al = 0.2 + 3 * rng.uniform(), be = 0.2 + 3 * rng.uniform(), rho = rng.uniform();
    const double e = mixed_moment_lmsb_stationary(al, be, rho, s);
    EXPECT_NEAR(mixed_moment_lmsb_recursive(al, be, rho, s) / e, 1.0, 1e-11);
  }
  EXPECT_THROW(mixed_moment_lmsb_stationary(1, 1, 0.5, AllocationStats::from_counts(std::vector<int>(21, 1))),
               SizeError);
}

TEST(LmsbMoment, MonteCarlo) {
  AllocationStats s;
  s.a = {1, 1, 1};
  s.b = {2, 1, 0};
  s.kappa = 3;
  const MsbpModel model{MarginalSeq::const_beta(1, 2), TransitionSpec::lazy(0.5), 0};
  Estimate e;
  mc_mixed_moment(model, s, 1000000, Rng(4), &e);
  EXPECT_NEAR(mixed_moment_lmsb_stationary(1, 2, 0.5, s), e.value, 3 * e.std_error);
}

TEST(LmsbMoment, AllocationProbabilitiesNormalize) {
  const std::size_t J = 40;
  double total = 0.0;
  for (std::size_t d1 = 1; d1 <= J; ++d1)
    for (std::size_t d2 = 1; d2 <= J; ++d2)
      total += mixed_moment_lmsb_recursive(1.0, 1.0, 0.5, AllocationStats::from_allocations({d1, d2}));
  EXPECT_LE(total, 1.0 + 1e-12);
  EXPECT_LT(1.0 - total, 1e-3);
}

TEST(AllocationLogprob, Examples) {
  LengthPrefix p;
  p.values = {0.5, 0.5};
  EXPECT_EQ(allocation_logprob_given_v(p, AllocationStats::from_counts({0, 0})), 0.0);
  AllocationStats s;
  s.a = {1, 1};
  s.b = {1, 0};
  s.kappa = 2;
  EXPECT_NEAR(allocation_logprob_given_v(p, s), 3 * std::log(0.5), 1e-15);
  p.values = {0.0, 0.3};
  EXPECT_EQ(allocation_logprob_given_v(p, s), -std::numeric_limits<double>::infinity());
  p.values = {1.0, 0.3};
  EXPECT_EQ(allocation_logprob_given_v(p, s), -std::numeric_limits<double>::infinity());
  p.values = {0.3};
  EXPECT_THROW(allocation_logprob_given_v(p, s), std::invalid_argument);
}

TEST(AllocationLogprob, MatchesDirectProduct) {
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    LengthPrefix p;
    std::vector<int> a(6);
    for (auto& x : a) x = static_cast<int>(rng.uniform() * 5);
    for (int j = 0; j < 6; ++j) p.values.push_back(rng.uniform());
    const auto s = AllocationStats::from_counts(a);
    double prod = 1.0;
    for (int j = 0; j < 6; ++j) prod *= std::pow(p.values[j], s.a[j]) * std::pow(1 - p.values[j], s.b[j]);
    EXPECT_NEAR(std::exp(allocation_logprob_given_v(p, s)) / prod, 1.0, 1e-12);
  }
}

TEST(TieSeries, IndependentReductions) {
  TieSeriesParams lazy{TieSeriesParams::Family::LmsbStationary, 1.0, 1.0, 0, 0.0};
  const auto r = tie_probability_series(lazy, 60, 1e-10);
  EXPECT_NEAR(r.value, 0.5, 1e-10);
  EXPECT_LE(r.tail_bound, 1e-10);
  EXPECT_TRUE(r.converged);
  TieSeriesParams bb{TieSeriesParams::Family::BmsbStationary, 1.0, 3.0, 0, 0.0};
  EXPECT_NEAR(tie_probability_series(bb, 200, 1e-12).value, 0.25, 1e-11);
  EXPECT_THROW(tie_probability_series(bb, 0, 1e-10), std::invalid_argument);
  EXPECT_THROW(tie_probability_series(bb, 1001, 1e-10), std::invalid_argument);
}

TEST(TieSeries, NonConvergenceFlag) {
  TieSeriesParams p{TieSeriesParams::Family::LmsbStationary, 0.05, 20.0, 0, 0.9};
  const auto r = tie_probability_series(p, 5, 1e-12);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.tail_bound, 1e-12);
}

TEST(TieSeries, LazyAgainstMonteCarlo) {
  TieSeriesParams p{TieSeriesParams::Family::LmsbStationary, 1.0, 2.0, 0, 0.5};
  const auto r = tie_probability_series(p, 1000, 1e-12);
  ASSERT_TRUE(r.converged);
  const MsbpModel model{MarginalSeq::const_beta(1, 2), TransitionSpec::lazy(0.5), 0};
  const Estimate e = tie_probability_mc(model, 1000000, Rng(6), 2);
  EXPECT_NEAR(r.value, e.value, 3 * e.std_error);
}

TEST(TieSeries, BetaBinomialAgainstMonteCarlo) {
  TieSeriesParams p{TieSeriesParams::Family::BmsbStationary, 1.0, 2.0, 4, 0.0};
  const auto r = tie_probability_series(p, 1000, 1e-12);
  ASSERT_TRUE(r.converged);
  const MsbpModel model{MarginalSeq::const_beta(1, 2), TransitionSpec::beta_binomial(4), 0};
  const Estimate e = tie_probability_mc(model, 1000000, Rng(7), 2);
  EXPECT_NEAR(r.value, e.value, 3 * e.std_error);
}

}  // namespace
}  // namespace msbp
