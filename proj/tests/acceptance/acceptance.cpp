// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance battery. Prints one "criterion N: PASS|FAIL" line per criterion
// and exits nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msbp/chains.hpp"
#include "msbp/cli/commands.hpp"
#include "msbp/gibbs.hpp"
#include "msbp/mixture.hpp"
#include "msbp/moments.hpp"
#include "msbp/parallel.hpp"
#include "msbp/specfun.hpp"
#include "msbp/stats.hpp"
#include "msbp/weights.hpp"
#include "oracles.hpp"

namespace {

using namespace msbp;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects sub-check results of one criterion.
class Report {
 public:
  explicit Report(int id) : id_(id), t0_(Clock::now()) {}

  bool check(bool ok, const std::string& what) {
    std::printf("  [%s] %s\n", ok ? "ok" : "FAILED", what.c_str());
    std::fflush(stdout);
    all_ = all_ && ok;
    return ok;
  }

  bool finish(const std::string& summary) {
    std::printf("criterion %d: %s %s (%.1f s)\n", id_, all_ ? "PASS" : "FAIL", summary.c_str(), seconds_since(t0_));
    std::fflush(stdout);
    return all_;
  }

  double elapsed() const { return seconds_since(t0_); }

 private:
  int id_;
  Clock::time_point t0_;
  bool all_ = true;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string z_line(const std::string& name, const Estimate& e, double expected) {
  return fmt("%s: estimate %.6f (se %.2e) vs %.6f, |z| = %.2f", name.c_str(), e.value, e.std_error, expected,
             std::fabs(e.value - expected) / e.std_error);
}

bool within_3se(const Estimate& e, double expected) { return std::fabs(e.value - expected) <= 3.0 * e.std_error; }

MsbpModel model_of(MarginalSeq marg, TransitionSpec trans) { return MsbpModel{std::move(marg), trans, 0}; }

// ----------------------------------------------------------------------- 1

bool criterion1() {
  Report rep(1);
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = 0.05 + (50.0 - 0.05) * rng.uniform();
    const double b = 0.05 + (50.0 - 0.05) * rng.uniform();
    const double x = rng.uniform();
    const BetaTails t = reg_inc_beta_tails(x, a, b);
    const double xr = t.lower <= t.upper ? inv_reg_inc_beta(t.lower, a, b) : inv_reg_inc_beta_upper(t.upper, a, b);
    worst = std::max(worst, std::fabs(xr - x));
  }
  rep.check(worst <= 1e-8, fmt("max |x' - x| over 1000 draws = %.3e (tolerance 1e-8)", worst));
  const double t = rep.elapsed();
  rep.check(t < 5.0, fmt("runtime %.3f s (limit 5 s)", t));
  return rep.finish("incomplete-beta roundtrip");
}

// ----------------------------------------------------------------------- 2

bool criterion2() {
  Report rep(2);
  const double ks_bb =
      marginal_check(model_of(MarginalSeq::pitman_yor(0.3, 2.0), TransitionSpec::beta_binomial(5)), 5, 10000, Rng(201));
  rep.check(ks_bb < 0.02, fmt("BetaBinomial(5) + PitmanYor(0.3, 2): KS(v_5) = %.4f (< 0.02)", ks_bb));
  const double ks_lazy =
      marginal_check(model_of(MarginalSeq::const_beta(1.0, 3.0), TransitionSpec::lazy(0.5)), 5, 10000, Rng(202));
  rep.check(ks_lazy < 0.02, fmt("Lazy(0.5) + ConstBeta(1, 3): KS(v_5) = %.4f (< 0.02)", ks_lazy));
  const double t = rep.elapsed();
  rep.check(t < 120.0, fmt("runtime %.2f s (limit 120 s)", t));
  return rep.finish("marginal preservation");
}

// ----------------------------------------------------------------------- 3

struct PairSample {
  std::vector<double> v1, v2;
};

PairSample sample_pairs(const MsbpModel& model, std::size_t n, const Rng& base, std::size_t j = 2) {
  PairSample s;
  s.v1.resize(n);
  s.v2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng r = base.split(i);
    const auto p = sample_prefix(model, j, r);
    s.v1[i] = p.values[j - 2];
    s.v2[i] = p.values[j - 1];
  }
  return s;
}

bool criterion3() {
  Report rep(3);
  const auto marg = MarginalSeq::pitman_yor(0.3, 2.0);
  const std::size_t n = 10000;
  const auto indep = sample_pairs(model_of(marg, TransitionSpec::independent()), n, Rng(301), 5);
  for (auto [name, trans] : {std::pair{"BetaBinomial(0)", TransitionSpec::beta_binomial(0)},
                             std::pair{"Lazy(0)", TransitionSpec::lazy(0.0)}}) {
    const auto s = sample_pairs(model_of(marg, trans), n, Rng(302), 5);
    for (int k = 0; k < 2; ++k) {
      const auto& a = k == 0 ? s.v1 : s.v2;
      const auto& b = k == 0 ? indep.v1 : indep.v2;
      const double d = ks_two_sample_statistic(a, b);
      const double p = ks_two_sample_pvalue(d, n, n);
      rep.check(p > 0.01, fmt("%s vs Independent, v_%d: two-sample KS D = %.4f, p = %.3f (> 0.01)", name, 4 + k, d, p));
    }
  }

  bool exact = true;
  for (int i = 0; i < 1000 && exact; ++i) {
    Rng a = Rng(303).split(i), b = Rng(303).split(i);
    exact = sample_prefix(model_of(marg, TransitionSpec::lazy(1.0)), 30, a).values ==
            sample_prefix(model_of(marg, TransitionSpec::completely_dependent()), 30, b).values;
  }
  rep.check(exact, "Lazy(1) trajectories equal CompletelyDependent ones under shared seeds (1000 x 30)");

  auto monotone = [&](const std::string& family, const std::vector<TransitionSpec>& ts,
                      const std::vector<std::string>& labels) {
    std::vector<Estimate> c;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto s = sample_pairs(model_of(marg, ts[k]), 100000, Rng(310 + k));
      c.push_back(correlation_estimate(s.v1, s.v2));
      std::printf("    %s %s: corr(v_1, v_2) = %.5f (se %.2e)\n", family.c_str(), labels[k].c_str(), c.back().value,
                  c.back().std_error);
    }
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
      const double gap = c[k + 1].value - c[k].value;
      const double se = std::hypot(c[k].std_error, c[k + 1].std_error);
      rep.check(gap > 3.0 * se, fmt("%s: %s -> %s increases by %.5f (> 3 se = %.5f)", family.c_str(),
                                    labels[k].c_str(), labels[k + 1].c_str(), gap, 3.0 * se));
    }
  };
  monotone("BetaBinomial",
           {TransitionSpec::beta_binomial(0), TransitionSpec::beta_binomial(5), TransitionSpec::beta_binomial(25),
            TransitionSpec::beta_binomial(100)},
           {"N=0", "N=5", "N=25", "N=100"});
  monotone("Lazy", {TransitionSpec::lazy(0.0), TransitionSpec::lazy(0.3), TransitionSpec::lazy(0.7), TransitionSpec::lazy(1.0)},
           {"rho=0", "rho=0.3", "rho=0.7", "rho=1"});
  return rep.finish("limit regimes");
}

// ----------------------------------------------------------------------- 4

bool criterion4() {
  Report rep(4);
  const std::uint64_t reps = 100000;
  for (double theta : {1.0, 3.0}) {
    const auto e =
        tie_probability_mc(model_of(MarginalSeq::const_beta(1.0, theta), TransitionSpec::independent()), reps, Rng(400 + theta));
    rep.check(within_3se(e, 1.0 / (1.0 + theta)), z_line(fmt("DP theta=%g", theta), e, 1.0 / (1.0 + theta)));
  }
  {
    const auto e = tie_probability_mc(model_of(MarginalSeq::pitman_yor(0.3, 2.0), TransitionSpec::independent()), reps,
                                      Rng(404));
    rep.check(within_3se(e, 0.7 / 3.0), z_line("PY(0.3, 2)", e, 0.7 / 3.0));
  }
  {
    const double oracle_value = oracle::integrate_gk([](double v) { return v / (2.0 - v); }, 0.0, 1.0);
    const auto e = tie_probability_mc(
        model_of(MarginalSeq::const_beta(1.0, 1.0), TransitionSpec::completely_dependent()), reps, Rng(405));
    rep.check(within_3se(e, oracle_value), z_line("Geometric Be(1,1) (quadrature)", e, oracle_value));
  }
  {
    const TieSeriesParams p{TieSeriesParams::Family::LmsbStationary, 1.0, 2.0, 0, 0.5};
    const auto series = tie_probability_series(p, 1000, 1e-12);
    rep.check(series.converged, fmt("LMSB series converged: %zu terms, tail bound %.2e", series.terms, series.tail_bound));
    const auto e = tie_probability_mc(model_of(MarginalSeq::const_beta(1.0, 2.0), TransitionSpec::lazy(0.5)), reps,
                                      Rng(406));
    rep.check(within_3se(e, series.value), z_line("LMSB rho=0.5 ConstBeta(1,2) series", e, series.value));
  }
  return rep.finish("tie probability oracles");
}

// ----------------------------------------------------------------------- 5

bool criterion5() {
  Report rep(5);
  const auto dir = std::filesystem::temp_directory_path() / "msbp_acceptance_moments";
  std::filesystem::remove_all(dir);
  cli::CommandOptions opts;
  opts.out = dir.string();
  opts.seed = 501;
  std::ostringstream log, err;
  const int rc = cli::run_command("moments-check", opts, log, err);
  std::printf("%s", log.str().c_str());
  rep.check(rc == cli::kExitOk || rc == cli::kExitValidation, fmt("moments-check ran (exit %d) %s", rc, err.str().c_str()));
  std::ifstream in(dir / "moments_check.json");
  if (!in) {
    rep.check(false, "moments_check.json was written");
    return rep.finish("mixed moments");
  }
  const auto j = nlohmann::json::parse(in);
  // Count rows per family in the CSV.
  std::ifstream csv(dir / "moments_check.csv");
  std::string line;
  int bmsb = 0, lmsb = 0;
  while (std::getline(csv, line)) {
    if (line.rfind("bmsb,", 0) == 0) ++bmsb;
    if (line.rfind("lmsb,", 0) == 0) ++lmsb;
  }
  rep.check(bmsb == 20 && lmsb == 20, fmt("%d BMSB and %d LMSB randomized configurations at 1e6 replicates", bmsb, lmsb));
  const double z = j.at("max_abs_z").get<double>();
  rep.check(z <= 3.0, fmt("max |closed - MC| / se = %.3f (<= 3)", z));
  const double gap = j.at("lmsb_endpoint_gap").get<double>();
  rep.check(gap <= 1e-6, fmt("LMSB endpoint continuity gap = %.3e (<= 1e-6)", gap));
  const double t = rep.elapsed();
  rep.check(t < 600.0, fmt("runtime %.1f s (limit 600 s)", t));
  std::filesystem::remove_all(dir);
  return rep.finish("mixed moments");
}

// ----------------------------------------------------------------------- 6

bool criterion6() {
  Report rep(6);
  const auto py = model_of(MarginalSeq::pitman_yor(0.3, 2.0), TransitionSpec::independent());
  const double exact = oracle::py_eppf(0.3, 2.0, {2, 1});
  const auto e = eppf_mc(py, {2, 1}, 1000000, Rng(601));
  rep.check(within_3se(e, exact), z_line("PY(0.3, 2) Phi(2,1)", e, exact));
  const auto bb = model_of(MarginalSeq::pitman_yor(0.3, 2.0), TransitionSpec::beta_binomial(5));
  const auto a = eppf_mc(bb, {2, 1}, 1000000, Rng(602));
  const auto b = eppf_mc(bb, {1, 2}, 1000000, Rng(603));
  const double se = std::hypot(a.std_error, b.std_error);
  rep.check(std::fabs(a.value - b.value) <= 3.0 * se,
            fmt("BetaBinomial(5): Phi(2,1) = %.6f, Phi(1,2) = %.6f, |diff| = %.2e (<= 3 joint se = %.2e)", a.value,
                b.value, std::fabs(a.value - b.value), 3.0 * se));
  return rep.finish("EPPF");
}

// ----------------------------------------------------------------------- 7

bool criterion7() {
  Report rep(7);
  const auto dp = model_of(MarginalSeq::const_beta(1.0, 3.0), TransitionSpec::independent());
  const auto e = mc_estimate(10000, Rng(701), 1, [&](Rng& r) { return static_cast<double>(sample_Kn(dp, 50, r)); });
  const double exact = oracle::crp_mean_kn(3.0, 50);
  std::printf("    sum_{i=1}^{50} 3 / (3 + i - 1) = %.4f\n", exact);
  rep.check(within_3se(e, exact), z_line("DP theta=3, n=50: E[K_n]", e, exact));
  return rep.finish("K_n");
}

// ----------------------------------------------------------------------- 8

std::vector<double> normalize_log(const std::vector<double>& lw) {
  const double mx = *std::max_element(lw.begin(), lw.end());
  std::vector<double> p(lw.size());
  double s = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) s += p[i] = std::exp(lw[i] - mx);
  for (auto& x : p) x /= s;
  return p;
}

bool criterion8() {
  Report rep(8);
  {
    // ConstBeta(1,1): Upsilon is the identity, so the three configurations
    // with v_j tied to a neighbour or free have closed measures.
    struct Point {
      std::vector<double> v;
      std::vector<int> counts;
      double rho;
    };
    for (const auto& pt : {Point{{0.3, 0.45, 0.6}, {0, 0, 0}, 0.5}, Point{{0.3, 0.45, 0.6}, {2, 1, 1}, 0.5},
                           Point{{0.2, 0.7, 0.4}, {1, 3, 0}, 0.35}}) {
      GibbsState s;
      s.model = model_of(MarginalSeq::const_beta(1.0, 1.0), TransitionSpec::lazy(pt.rho));
      s.prefix.values = pt.v;
      s.prefix.fresh = {1, 1, 1};
      s.stats = AllocationStats::from_counts(pt.counts);
      const auto c = lmsb_conditional(s, 2);
      const double sum = c.w_left + c.w_right + c.w_fresh;
      const int a = s.a(2), b = s.b(2);
      auto L = [&](double x) { return std::pow(x, a) * std::pow(1 - x, b); };
      const double mass = oracle::integrate(L, 0.0, 1.0);
      // (copied in, fresh out), (fresh in, copied out), (fresh in, fresh out).
      const double r = pt.rho;
      std::array<double, 3> m{r * (1 - r) * L(pt.v[0]), (1 - r) * r * L(pt.v[2]), (1 - r) * (1 - r) * mass};
      const double tot = m[0] + m[1] + m[2];
      const double tv = 0.5 * (std::fabs(c.w_left - m[0] / tot) + std::fabs(c.w_right - m[1] / tot) +
                               std::fabs(c.w_fresh - m[2] / tot));
      rep.check(std::fabs(sum - 1.0) <= 1e-12 && tv < 1e-10,
                fmt("lazy weights at v=(%.2f,%.2f,%.2f) a=%d b=%d rho=%.2f: |sum-1| = %.1e, TV to enumeration = %.1e",
                    pt.v[0], pt.v[1], pt.v[2], a, b, pt.rho, std::fabs(sum - 1.0), tv));
    }
  }
  {
    GibbsState s;
    s.model = model_of(MarginalSeq::const_beta(1.0, 1.0), TransitionSpec::beta_binomial(2));
    s.prefix.values = {0.5, 0.5};
    s.prefix.z = {0, 0};
    s.stats = AllocationStats::from_counts({0, 0});
    const auto p = normalize_log(bmsb_z_log_weights(s, 1));
    // Bin(2, 1/2)(z) x Be(1+z, 3-z)(1/2) normalized: (1/6, 2/3, 1/6).
    const double err = std::max({std::fabs(p[0] - 1.0 / 6), std::fabs(p[1] - 2.0 / 3), std::fabs(p[2] - 1.0 / 6)});
    rep.check(err < 1e-14, fmt("BMSB z-categorical vs hand enumeration (1/6, 2/3, 1/6): max error %.1e", err));
  }
  {
    GibbsState s;
    s.model = model_of(MarginalSeq::const_beta(1.0, 1.0), TransitionSpec::beta_binomial(1));
    s.prefix.values = {0.5, 0.5};
    s.prefix.z = {0, 0};
    s.stats = AllocationStats::from_counts({});
    s.hyper_prior = HyperPrior::uniform_n(3);
    const auto p = normalize_log(bmsb_N_log_posterior(s));
    std::vector<double> ref(4);
    for (int N = 0; N <= 3; ++N)
      ref[N] = oracle::binomial_pmf(N, 0, 0.5) * oracle::binomial_pmf(N, 0, 0.5) * oracle::beta_pdf(0.5, 1, 1 + N);
    const double tot = std::accumulate(ref.begin(), ref.end(), 0.0);
    double err = 0.0;
    for (int N = 0; N <= 3; ++N) err = std::max(err, std::fabs(p[N] - ref[N] / tot));
    rep.check(p.size() == 4 && err < 1e-12, fmt("BMSB N-posterior vs 4-cell enumeration: max error %.1e", err));
  }
  {
    std::vector<std::uint8_t> fresh(10, 0);
    fresh[0] = fresh[3] = fresh[5] = fresh[9] = 1;
    GibbsState s;
    s.model = model_of(MarginalSeq::const_beta(1.0, 1.0), TransitionSpec::lazy(0.5));
    s.prefix.values.assign(10, 0.5);
    s.prefix.fresh = fresh;
    s.hyper_prior = HyperPrior::beta_rho(2.0, 3.0);
    // m = 10, r = 4: Be(2 + 10 - 4, 3 + 4 - 1) = Be(8, 6).
    Rng rng(801);
    std::vector<double> xs(20000);
    for (auto& x : xs) {
      lmsb_update_rho(s, rng);
      x = s.model.trans.rho;
    }
    const double ks = ks_statistic(xs, [](double x) { return oracle::beta_cdf(x, 8.0, 6.0); });
    rep.check(ks < 0.02, fmt("rho-posterior draws vs Be(a+m-r, b+r-1) = Be(8, 6): KS %.4f (< 0.02)", ks));
  }
  return rep.finish("full conditionals");
}

// ----------------------------------------------------------------------- 9

// Successive-conditional simulator over (lengths, allocations of n_obs
// observations): allocations are redrawn from the weights, then one Gibbs
// sweep runs on the lengths. The recorded lengths must follow the prior.
struct GewekeTrace {
  std::vector<double> v1, v2, dep;
};

GewekeTrace geweke_gibbs(MsbpModel model, HyperPrior hyper, std::size_t n_obs, std::size_t draws, std::size_t thin,
                         Rng& rng) {
  GibbsState s;
  s.model = std::move(model);
  s.hyper_prior = std::move(hyper);
  extend_prefix(s.prefix, s.model, 2, rng);
  GewekeTrace out;
  std::vector<std::size_t> d(n_obs);
  for (std::size_t it = 0; it < (draws + 100) * thin; ++it) {
    for (auto& di : d) {
      const double u = rng.uniform();
      double cum = 0.0, rest = 1.0;
      std::size_t j = 1;
      for (;; ++j) {
        if (j > s.prefix.size()) extend_prefix(s.prefix, s.model, j, rng);
        const double v = s.prefix.values[j - 1];
        cum += v * rest;
        rest *= 1.0 - v;
        if (u < cum || rest <= 0.0 || j >= 1000000) break;
      }
      di = j;
    }
    s.stats = n_obs ? AllocationStats::from_allocations(d) : AllocationStats::from_counts({});
    resize_prefix(s, 2, rng);
    gibbs_sweep(s, rng);
    if (it >= 100 * thin && (it + 1) % thin == 0) {
      out.v1.push_back(s.prefix.values[0]);
      out.v2.push_back(s.prefix.values[1]);
      out.dep.push_back(s.model.trans.family == TransitionSpec::Family::Lazy ? s.model.trans.rho : s.model.trans.N);
    }
  }
  return out;
}

// Mixture counterpart: observations are regenerated from the current atoms
// after each ordered-allocation sweep.
struct MixtureTrace {
  std::vector<double> precision, z_mean, block_weight, dep;
};

MixtureTrace geweke_mixture(MixtureSpec spec, std::size_t draws, std::size_t thin, Rng& rng) {
  OasState s = oas_init(spec, rng);
  MixtureTrace out;
  for (std::size_t it = 0; it < (draws + 100) * thin; ++it) {
    oas_sweep(s, spec, rng);
    for (std::size_t i = 0; i < spec.data.size(); ++i) {
      const Atom& a = s.atoms[static_cast<std::size_t>(s.d[i]) - 1];
      spec.data[i] = a.mean + sample_normal(rng) / std::sqrt(a.precision);
    }
    if (it >= 100 * thin && (it + 1) % thin == 0) {
      const Atom& a = s.atoms[0];
      out.precision.push_back(a.precision);
      out.z_mean.push_back((a.mean - spec.base.mu0) * std::sqrt(spec.base.lambda0 * a.precision));
      out.block_weight.push_back(s.block_weight(1));
      const auto& t = s.gibbs.model.trans;
      out.dep.push_back(t.family == TransitionSpec::Family::Lazy ? t.rho : t.N);
    }
  }
  return out;
}

// Size-biased first weight under the prior, with the dependence parameter
// drawn from its hyperprior when there is one.
std::vector<double> prior_size_biased_w1(const MsbpModel& model, const HyperPrior& hyper, std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  for (auto& x : w) {
    MsbpModel m = model;
    if (hyper.kind == HyperPrior::Kind::BetaRho) m.trans = TransitionSpec::lazy(sample_beta(rng, hyper.a, hyper.b));
    if (hyper.kind == HyperPrior::Kind::DiscreteN)
      m.trans = TransitionSpec::beta_binomial(static_cast<int>(sample_categorical(rng, hyper.n_pmf)));
    x = size_biased_sample(m, 1, rng).picked[0];
  }
  return w;
}

bool criterion9() {
  Report rep(9);
  const std::size_t draws = 20000;
  struct Family {
    std::string name;
    MsbpModel model;
    HyperPrior hyper;
  };
  const auto py = MarginalSeq::pitman_yor(0.3, 1.0);
  const std::vector<Family> families{
      {"Independent PY(0.3,1)", model_of(py, TransitionSpec::independent()), HyperPrior::none()},
      {"CompletelyDependent ConstBeta(1,2)", model_of(MarginalSeq::const_beta(1.0, 2.0), TransitionSpec::completely_dependent()),
       HyperPrior::none()},
      {"BetaBinomial(3) PY(0.3,1)", model_of(py, TransitionSpec::beta_binomial(3)), HyperPrior::none()},
      {"BetaBinomial(N ~ Unif{0..10}) PY(0.3,1)", model_of(py, TransitionSpec::beta_binomial(4)), HyperPrior::uniform_n(10)},
      {"Lazy(0.5) PY(0.3,1)", model_of(py, TransitionSpec::lazy(0.5)), HyperPrior::none()},
      {"Lazy(rho ~ Unif) PY(0.3,1)", model_of(py, TransitionSpec::lazy(0.5)), HyperPrior::beta_rho(1.0, 1.0)},
  };
  std::uint64_t stream = 900;
  for (const auto& f : families) {
    const auto b1 = f.model.marg.at(1), b2 = f.model.marg.at(2);
    for (std::size_t n_obs : {std::size_t{0}, std::size_t{4}}) {
      Rng rng(++stream);
      const auto t0 = Clock::now();
      const auto tr = geweke_gibbs(f.model, f.hyper, n_obs, draws, n_obs ? 4 : 1, rng);
      const double k1 = ks_statistic(tr.v1, [&](double x) { return oracle::beta_cdf(x, b1.alpha, b1.beta); });
      const double k2 = ks_statistic(tr.v2, [&](double x) { return oracle::beta_cdf(x, b2.alpha, b2.beta); });
      std::string extra;
      bool ok = k1 < 0.03 && k2 < 0.03;
      if (f.hyper.kind == HyperPrior::Kind::BetaRho) {
        const double kr = ks_statistic(tr.dep, [](double x) { return x; });
        extra = fmt(", KS(rho) %.4f", kr);
        ok = ok && kr < 0.03;
      } else if (f.hyper.kind == HyperPrior::Kind::DiscreteN) {
        // Discrete uniform: distance between the empirical and exact CDFs.
        std::vector<double> cnt(11, 0.0);
        for (double x : tr.dep) cnt[static_cast<std::size_t>(x)] += 1.0;
        double c = 0.0, worst = 0.0;
        for (int k = 0; k <= 10; ++k) {
          c += cnt[k] / static_cast<double>(tr.dep.size());
          worst = std::max(worst, std::fabs(c - (k + 1) / 11.0));
        }
        extra = fmt(", CDF distance(N) %.4f", worst);
        ok = ok && worst < 0.03;
      }
      rep.check(ok, fmt("gibbs %s, %zu observations: KS(v_1) %.4f, KS(v_2) %.4f%s (< 0.03; %.1f s)",
                        f.name.c_str(), n_obs, k1, k2, extra.c_str(), seconds_since(t0)));
    }
  }

  const std::vector<Family> mixtures{
      {"DP theta=1", model_of(MarginalSeq::const_beta(1.0, 1.0), TransitionSpec::independent()), HyperPrior::none()},
      {"Lazy(rho ~ Unif) PY(0.2,1)", model_of(MarginalSeq::pitman_yor(0.2, 1.0), TransitionSpec::lazy(0.5)),
       HyperPrior::beta_rho(1.0, 1.0)},
      {"BetaBinomial(N ~ Unif{0..10}) PY(0.3,1)", model_of(py, TransitionSpec::beta_binomial(4)), HyperPrior::uniform_n(10)},
  };
  for (const auto& f : mixtures) {
    MixtureSpec spec;
    spec.model = f.model;
    spec.hyper_prior = f.hyper;
    spec.base = NormalGamma{0.0, 1.0, 2.0, 1.0};
    const auto b1 = f.model.marg.at(1);
    {
      // No data: the lengths are sampled from the prior alone.
      Rng rng(++stream);
      OasState s = oas_init(spec, rng);
      std::vector<double> w1;
      for (std::size_t it = 0; it < draws; ++it) {
        oas_sweep(s, spec, rng);
        w1.push_back(s.weights.weights[0]);
      }
      const double k = ks_statistic(w1, [&](double x) { return oracle::beta_cdf(x, b1.alpha, b1.beta); });
      rep.check(k < 0.03, fmt("mixture %s, no data: KS(w_1) %.4f (< 0.03)", f.name.c_str(), k));
    }
    {
      spec.data = {0.0, 0.5, -0.5};
      Rng rng(++stream);
      const auto t0 = Clock::now();
      const auto tr = geweke_mixture(spec, draws, 3, rng);
      const double kp = ks_statistic(tr.precision, [&](double x) { return oracle::gamma_rate_cdf(x, 2.0, 1.0); });
      const double km = ks_statistic(tr.z_mean, [](double x) { return oracle::normal_cdf(x); });
      Rng ref_rng(++stream);
      const auto ref = prior_size_biased_w1(f.model, f.hyper, draws, ref_rng);
      const double kw = ks_two_sample_statistic(tr.block_weight, ref);
      bool ok = kp < 0.03 && km < 0.03 && kw < 0.03;
      std::string extra;
      if (f.hyper.kind == HyperPrior::Kind::BetaRho) {
        const double kr = ks_statistic(tr.dep, [](double x) { return x; });
        extra = fmt(", KS(rho) %.4f", kr);
        ok = ok && kr < 0.03;
      }
      rep.check(ok, fmt("mixture %s, 3 regenerated observations: KS(precision) %.4f, KS(mean) %.4f, "
                        "two-sample KS(w~_1) %.4f%s (< 0.03; %.1f s)",
                        f.name.c_str(), kp, km, kw, extra.c_str(), seconds_since(t0)));
    }
  }
  return rep.finish("prior reproduction");
}

// ---------------------------------------------------------------------- 10

bool criterion10() {
  Report rep(10);
  const auto truth = eight_gaussian_benchmark();
  const auto grid = uniform_grid(-18.0, 14.0, 2048);
  const auto truth_density = truth.density(grid);
  struct Prior {
    std::string name;
    MsbpModel model;
    HyperPrior hyper;
  };
  const std::vector<Prior> priors{
      {"DP theta=1.6", model_of(MarginalSeq::const_beta(1.0, 1.6), TransitionSpec::independent()), HyperPrior::none()},
      {"Lazy(rho ~ Unif) theta=1.4", model_of(MarginalSeq::const_beta(1.0, 1.4), TransitionSpec::lazy(0.5)),
       HyperPrior::beta_rho(1.0, 1.0)},
  };
  std::uint64_t seed = 1000;
  for (const auto& p : priors) {
    for (int r = 0; r < 3; ++r) {
      const auto t0 = Clock::now();
      Rng rng(++seed);
      MixtureSpec spec;
      spec.model = p.model;
      spec.hyper_prior = p.hyper;
      spec.data = truth.sample(150, rng);
      spec.base.mu0 = std::accumulate(spec.data.begin(), spec.data.end(), 0.0) / 150.0;
      const auto draws = fit(spec, 5000, 1000, 4, rng);
      const double tv = tv_distance(density_estimate(draws, spec, grid), truth_density);
      const auto pmf = posterior_Kn(draws);
      const auto mode = static_cast<std::size_t>(std::max_element(pmf.begin(), pmf.end()) - pmf.begin());
      const double t = seconds_since(t0);
      rep.check(tv >= 0.12 && tv <= 0.25 && mode >= 6 && mode <= 10 && t < 600.0,
                fmt("%s replicate %d: TV %.4f (in [0.12, 0.25]), K_n mode %zu (in 6..10), %.1f s (< 600 s)",
                    p.name.c_str(), r + 1, tv, mode, t));
    }
  }
  return rep.finish("mixture benchmark");
}

// ---------------------------------------------------------------------- 11

bool criterion11() {
  Report rep(11);
  const std::size_t n = 10000;
  auto test = [&](const MsbpModel& model, std::uint64_t seed) {
    std::vector<double> x1(n), y1(n), x2(n), y2(n);
    const Rng base(seed);
    for (std::size_t i = 0; i < n; ++i) {
      Rng r = base.split(2 * i);
      const auto p = stick_break(sample_prefix(model, 2, r));
      x1[i] = p.weights[0];
      y1[i] = p.weights[1];
      Rng q = base.split(2 * i + 1);
      const auto sb = size_biased_sample(model, 2, q);
      x2[i] = sb.picked[0];
      y2[i] = sb.picked[1];
    }
    Rng perm = base.split(~std::uint64_t{0});
    return ecdf2_permutation_test(x1, y1, x2, y2, 199, perm);
  };
  const auto marg = MarginalSeq::pitman_yor(0.3, 1.0);
  const auto py = test(model_of(marg, TransitionSpec::independent()), 1101);
  rep.check(py.p_value > 0.01,
            fmt("PY(0.3, 1): (w_1, w_2) vs (w~_1, w~_2) statistic %.4f, p = %.3f (> 0.01)", py.statistic, py.p_value));
  const auto bb = test(model_of(marg, TransitionSpec::beta_binomial(25)), 1102);
  rep.check(bb.p_value < 0.01, fmt("BetaBinomial(25) with PY(0.3, 1) marginals: statistic %.4f, p = %.3f (< 0.01)",
                                   bb.statistic, bb.p_value));
  return rep.finish("size-biased invariance");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                    criterion5, criterion6, criterion7, criterion8,
                                                    criterion9, criterion10, criterion11};
  // Optional arguments select criteria by number.
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  int failed = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", id);
      return 2;
    }
    if (!criteria[id - 1]()) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, selected.size());
  return failed == 0 ? 0 : 1;
}
