// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include "msbp/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>

#include <json.hpp>

#include "msbp/chains.hpp"
#include "msbp/cli/output.hpp"
#include "msbp/gibbs.hpp"
#include "msbp/mixture.hpp"
#include "msbp/moments.hpp"
#include "msbp/parallel.hpp"
#include "msbp/specfun.hpp"
#include "msbp/stats.hpp"
#include "msbp/weights.hpp"

namespace msbp::cli {

namespace {

using json = nlohmann::ordered_json;
using Schema = std::map<std::string, std::vector<KeySpec>>;
namespace fs = std::filesystem;

constexpr const char* kRun = "run";

Schema schema_for(const std::string& command) {
  std::string reps = "10000";
  if (command == "validate") reps = "20000";
  if (command == "moments-check") reps = "1000000";
  if (command == "fit-mixture") reps = "1";
  Schema s;
  s[kRun] = {{"seed", ValueType::UInt64, "1"},
             {"reps", ValueType::UInt64, reps},
             {"out", ValueType::String, "msbp-out"},
             {"threads", ValueType::Int, "0"}};
  if (command == "prior-curves") {
    s[command] = {{"family", ValueType::String, "bmsb"},
                  {"sigma", ValueType::Double, "0"},
                  {"theta", ValueType::DoubleList, "0.5,1,2,4,6,8,10"},
                  {"dependence", ValueType::String, "auto"},
                  {"kn_n_max", ValueType::Int, "150"}};
  } else if (command == "validate") {
    s[command] = {{"inverse_tolerance", ValueType::Double, "1e-10"},
                  {"inverse_step", ValueType::Double, "1e-14"},
                  {"roundtrip_samples", ValueType::Int, "1000"}};
  } else if (command == "fit-mixture") {
    s[command] = {{"data", ValueType::String, ""},
                  {"n", ValueType::Int, "150"},
                  {"prior", ValueType::String, "dp"},
                  {"theta", ValueType::Double, "1.6"},
                  {"sigma", ValueType::Double, "0"},
                  {"N", ValueType::Int, "5"},
                  {"rho", ValueType::Double, "0.5"},
                  {"dependence_prior", ValueType::String, "fixed"},
                  {"n_max", ValueType::Int, "200"},
                  {"iters", ValueType::Int, "5000"},
                  {"burnin", ValueType::Int, "1000"},
                  {"thin", ValueType::Int, "4"},
                  {"grid_lo", ValueType::Double, "-18"},
                  {"grid_hi", ValueType::Double, "14"},
                  {"grid_points", ValueType::Int, "2048"},
                  {"truth", ValueType::String, "auto"},
                  {"mu0", ValueType::String, "data-mean"},
                  {"lambda0", ValueType::Double, "0.01"},
                  {"a0", ValueType::Double, "0.5"},
                  {"b0", ValueType::Double, "0.5"}};
  } else if (command == "moments-check") {
    s[command] = {{"configs", ValueType::Int, "20"},
                  {"kappa_max", ValueType::Int, "4"},
                  {"count_max", ValueType::Int, "3"},
                  {"n_max", ValueType::Int, "6"},
                  {"endpoint_eps", ValueType::Double, "1e-9"}};
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return s;
}

struct RunContext {
  std::uint64_t seed;
  std::uint64_t reps;
  fs::path out;
  int threads;
  RunHeader header;
};

RunContext context_of(const Config& c) {
  RunContext ctx;
  ctx.seed = c.uint64(kRun, "seed");
  ctx.reps = c.uint64(kRun, "reps");
  ctx.out = c.text(kRun, "out");
  const auto t = c.integer(kRun, "threads");
  if (t < 0) throw ConfigError("run.threads must be nonnegative");
  ctx.threads = resolve_threads(static_cast<int>(t));
  ctx.header = RunHeader{MSBP_VERSION, ctx.seed, c.hash({"run.out", "run.threads"})};
  ensure_directory(ctx.out);
  return ctx;
}

json config_json(const Config& c) {
  json j = json::object();
  for (const auto& [section, keys] : c.values()) {
    json sec = json::object();
    for (const auto& [k, v] : keys) sec[k] = v;
    j[section] = sec;
  }
  return j;
}

void write_manifest(const RunContext& ctx, const std::string& command, const Config& c, json extra = json::object()) {
  json j = ctx.header.json();
  j["command"] = command;
  j["config"] = config_json(c);
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_json(ctx.out / "manifest.json", j);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

MarginalSeq pitman_yor_checked(double sigma, double theta) {
  require(sigma >= 0.0 && sigma < 1.0, "sigma must lie in [0, 1)");
  require(theta > -sigma && (sigma > 0.0 || theta > 0.0), "theta must exceed -sigma (and be positive when sigma = 0)");
  return MarginalSeq::pitman_yor(sigma, theta);
}

// ------------------------------------------------------------- prior-curves

int prior_curves(const Config& c, std::ostream& log) {
  const std::string sec = "prior-curves";
  const RunContext ctx = context_of(c);
  const std::string family = c.text(sec, "family");
  require(family == "bmsb" || family == "lmsb", "prior-curves.family must be bmsb or lmsb");
  const double sigma = c.real(sec, "sigma");
  const auto thetas = c.reals(sec, "theta");
  std::vector<double> deps;
  if (c.text(sec, "dependence") == "auto") {
    deps = family == "bmsb" ? std::vector<double>{0, 5, 25, 100} : std::vector<double>{0, 0.3, 0.7, 1};
  } else {
    deps = parse_double_list(c.text(sec, "dependence"), sec + ".dependence");
  }
  for (double d : deps) {
    if (family == "bmsb")
      require(d >= 0.0 && d == std::floor(d) && d <= 1e6, "BetaBinomial dependence values must be integers >= 0");
    else
      require(d >= 0.0 && d <= 1.0, "lazy dependence values must lie in [0, 1]");
  }
  const auto n_max = c.integer(sec, "kn_n_max");
  require(n_max >= 1, "prior-curves.kn_n_max must be positive");
  require(ctx.reps >= 100, "run.reps must be at least 100");

  const Rng base(ctx.seed);
  CsvWriter tie(ctx.out / "tie_probability.csv", ctx.header,
                {"family", "sigma", "theta", "dependence", "statistic", "estimate", "std_error"});
  json curves = json::array();
  std::uint64_t cell = 0;
  for (double theta : thetas) {
    for (double dep : deps) {
      MsbpModel model;
      model.marg = pitman_yor_checked(sigma, theta);
      model.trans = family == "bmsb" ? TransitionSpec::beta_binomial(static_cast<int>(dep)) : TransitionSpec::lazy(dep);
      const Estimate tau = tie_probability_mc(model, ctx.reps, base.split(2 * cell), ctx.threads);
      tie.cell(family).cell(sigma).cell(theta).cell(dep).cell(std::string("tau")).cell(tau.value).cell(tau.std_error);
      tie.end_row();

      const std::size_t nm = static_cast<std::size_t>(n_max);
      const auto acc = mc_accumulate(ctx.reps, base.split(2 * cell + 1), ctx.threads, nm,
                                     [&](Rng& r, std::span<double> out) {
                                       const auto times = sample_block_creation_times(model, nm, r);
                                       std::size_t k = 0;
                                       for (std::size_t n = 1; n <= nm; ++n) {
                                         while (k < times.size() && times[k] <= n) ++k;
                                         out[n - 1] = static_cast<double>(k);
                                       }
                                     });
      const std::string name = "kn_curve_" + std::to_string(cell) + ".csv";
      CsvWriter kn(ctx.out / name, ctx.header, {"theta", "dependence", "n", "mean", "variance", "mean_std_error"});
      for (std::size_t n = 1; n <= nm; ++n) {
        const Estimate e = acc[n - 1].estimate();
        kn.cell(theta).cell(dep).cell(static_cast<std::int64_t>(n)).cell(e.value).cell(acc[n - 1].variance()).cell(
            e.std_error);
        kn.end_row();
      }
      kn.close();
      curves.push_back(json{{"file", name}, {"theta", theta}, {"dependence", dep}});
      ++cell;
    }
  }
  tie.close();
  json resolved;
  resolved["theta"] = thetas;
  resolved["dependence"] = deps;
  write_manifest(ctx, "prior-curves", c, json{{"resolved", resolved}, {"kn_curves", curves}});
  log << "prior-curves: wrote " << cell << " cells to " << ctx.out.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- validate

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;
  double runtime_ms = 0.0;
};

CheckResult run_check(const std::string& name, const std::function<CheckResult()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.name = name;
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

// Inverts the smaller tail so that quantiles near 1 stay representable.
double tail_roundtrip(double x, double a, double b, const InverseOptions& opts, double* residual) {
  const BetaTails t = reg_inc_beta_tails(x, a, b);
  if (t.lower <= t.upper) {
    const double xr = inv_reg_inc_beta(t.lower, a, b, opts);
    *residual = std::fabs(reg_inc_beta_tails(xr, a, b).lower - t.lower);
    return xr;
  }
  const double xr = inv_reg_inc_beta_upper(t.upper, a, b, opts);
  *residual = std::fabs(reg_inc_beta_tails(xr, a, b).upper - t.upper);
  return xr;
}

int validate(const Config& c, std::ostream& log) {
  const std::string sec = "validate";
  const RunContext ctx = context_of(c);
  InverseOptions opts;
  opts.tolerance = c.real(sec, "inverse_tolerance");
  opts.relative_step = c.real(sec, "inverse_step");
  require(opts.tolerance > 0.0 && opts.relative_step > 0.0, "inverse tolerances must be positive");
  const auto samples = c.integer(sec, "roundtrip_samples");
  require(samples >= 1, "validate.roundtrip_samples must be positive");
  require(ctx.reps >= 100, "run.reps must be at least 100");
  const Rng base(ctx.seed);

  std::vector<CheckResult> checks;
  {
    // Shared draws for the two roundtrip checks.
    Rng r = base.split(0);
    std::vector<std::array<double, 3>> pts(static_cast<std::size_t>(samples));
    for (auto& p : pts) {
      p[1] = 0.05 + (50.0 - 0.05) * r.uniform();
      p[2] = 0.05 + (50.0 - 0.05) * r.uniform();
      p[0] = r.uniform();
    }
    double worst_x = 0.0, worst_res = 0.0;
    checks.push_back(run_check("incbeta_roundtrip_x", [&] {
      for (const auto& p : pts) {
        double res = 0.0;
        const double xr = tail_roundtrip(p[0], p[1], p[2], opts, &res);
        worst_x = std::max(worst_x, std::fabs(xr - p[0]));
        worst_res = std::max(worst_res, res);
      }
      return CheckResult{"", worst_x <= 1e-8, worst_x, 1e-8, "max |x' - x| over randomized (x, a, b)", 0.0};
    }));
    checks.push_back(run_check("incbeta_roundtrip_p", [&] {
      return CheckResult{"", worst_res <= 1e-8, worst_res, 1e-8, "max tail residual |I(x') - p|", 0.0};
    }));
  }
  auto mc_check = [&](const std::string& name, const MsbpModel& model, double expected, std::uint64_t stream) {
    return run_check(name, [&, expected, stream] {
      const Estimate e = tie_probability_mc(model, ctx.reps, base.split(stream), ctx.threads);
      const double z = std::fabs(e.value - expected) / e.std_error;
      return CheckResult{"", z <= 3.0, z, 3.0, "|estimate - exact| / stderr", 0.0};
    });
  };
  {
    MsbpModel dp{MarginalSeq::pitman_yor(0.0, 1.0), TransitionSpec::independent(), 0};
    checks.push_back(mc_check("tie_probability_dp", dp, 0.5, 1));
    MsbpModel py{MarginalSeq::pitman_yor(0.3, 2.0), TransitionSpec::independent(), 0};
    checks.push_back(mc_check("tie_probability_py", py, 0.7 / 3.0, 2));
  }
  checks.push_back(run_check("kn_mean_dp", [&] {
    MsbpModel dp{MarginalSeq::pitman_yor(0.0, 3.0), TransitionSpec::independent(), 0};
    const Estimate e = mc_estimate(ctx.reps, base.split(3), ctx.threads,
                                   [&](Rng& r) { return static_cast<double>(sample_Kn(dp, 50, r)); });
    double exact = 0.0;
    for (int i = 1; i <= 50; ++i) exact += 3.0 / (3.0 + i - 1.0);
    const double z = std::fabs(e.value - exact) / e.std_error;
    return CheckResult{"", z <= 3.0, z, 3.0, "|mean K_50 - sum theta/(theta+i-1)| / stderr", 0.0};
  }));
  checks.push_back(run_check("moments_bmsb_transfer_vs_enumeration", [&] {
    double worst = 0.0;
    const std::vector<std::vector<int>> counts = {{2, 0}, {1, 2, 1}, {0, 3, 0, 2}, {3}};
    for (const auto& a : counts)
      for (int N : {0, 2, 5}) {
        const auto st = AllocationStats::from_counts(a);
        const double e = mixed_moment_bmsb_stationary(2.0, 3.0, N, st);
        const double t = mixed_moment_bmsb_transfer(2.0, 3.0, N, st);
        worst = std::max(worst, std::fabs(e - t) / std::fabs(e));
      }
    return CheckResult{"", worst <= 1e-10, worst, 1e-10, "max relative difference", 0.0};
  }));
  checks.push_back(run_check("moments_lmsb_recursive_vs_enumeration", [&] {
    double worst = 0.0;
    const std::vector<std::vector<int>> counts = {{2, 0}, {1, 2, 1}, {0, 3, 0, 2}, {3}};
    for (const auto& a : counts)
      for (double rho : {0.0, 0.4, 1.0}) {
        const auto st = AllocationStats::from_counts(a);
        const double e = mixed_moment_lmsb_stationary(2.0, 3.0, rho, st);
        const double t = mixed_moment_lmsb_recursive(2.0, 3.0, rho, st);
        worst = std::max(worst, std::fabs(e - t) / std::fabs(e));
      }
    return CheckResult{"", worst <= 1e-10, worst, 1e-10, "max relative difference", 0.0};
  }));
  checks.push_back(run_check("marginal_bmsb_v5", [&] {
    MsbpModel m{MarginalSeq::pitman_yor(0.3, 2.0), TransitionSpec::beta_binomial(5), 0};
    const double ks = marginal_check(m, 5, 10000, base.split(4));
    return CheckResult{"", ks < 0.02, ks, 0.02, "KS distance of v_5 to its Beta marginal", 0.0};
  }));
  checks.push_back(run_check("marginal_lmsb_v5", [&] {
    MsbpModel m{MarginalSeq::const_beta(1.0, 3.0), TransitionSpec::lazy(0.5), 0};
    const double ks = marginal_check(m, 5, 10000, base.split(5));
    return CheckResult{"", ks < 0.02, ks, 0.02, "KS distance of v_5 to its Beta marginal", 0.0};
  }));
  checks.push_back(run_check("lazy_conditional_normalizes", [&] {
    GibbsState s;
    s.model = MsbpModel{MarginalSeq::const_beta(1.0, 1.0), TransitionSpec::lazy(0.5), 0};
    s.prefix.values = {0.3, 0.6, 0.2};
    s.prefix.fresh = {1, 1, 1};
    s.stats = AllocationStats::from_counts({1, 2, 1});
    double worst = 0.0;
    for (std::size_t j = 1; j <= 3; ++j) {
      const auto q = lmsb_conditional(s, j);
      worst = std::max(worst, std::fabs(q.w_left + q.w_right + q.w_fresh - 1.0));
    }
    return CheckResult{"", worst <= 1e-12, worst, 1e-12, "max |sum of weights - 1|", 0.0};
  }));

  bool all = true;
  json report = ctx.header.json();
  report["checks"] = json::array();
  for (const auto& r : checks) {
    all = all && r.passed;
    report["checks"].push_back(json{{"name", r.name},
                                    {"passed", r.passed},
                                    {"observed", r.observed},
                                    {"threshold", r.threshold},
                                    {"detail", r.detail},
                                    {"runtime_ms", r.runtime_ms}});
    log << (r.passed ? "PASS " : "FAIL ") << r.name << " observed=" << format_double(r.observed)
        << " threshold=" << format_double(r.threshold) << "\n";
  }
  report["passed"] = all;
  write_json(ctx.out / "validate.json", report);
  write_manifest(ctx, "validate", c);
  return all ? kExitOk : kExitValidation;
}

// ------------------------------------------------------------- fit-mixture

struct ReplicateResult {
  std::size_t n = 0;
  std::optional<double> tv;
  std::vector<double> kn_pmf;
  std::vector<int> clustering;
  double runtime_s = 0.0;
};

int fit_mixture(const Config& c, std::ostream& log) {
  const std::string sec = "fit-mixture";
  const RunContext ctx = context_of(c);
  const std::string prior = c.text(sec, "prior");
  const double theta = c.real(sec, "theta");
  const double sigma = c.real(sec, "sigma");
  const std::string dep_prior = c.text(sec, "dependence_prior");
  require(dep_prior == "fixed" || dep_prior == "uniform", "fit-mixture.dependence_prior must be fixed or uniform");
  const auto iters = c.integer(sec, "iters");
  const auto burnin = c.integer(sec, "burnin");
  const auto thin = c.integer(sec, "thin");
  require(burnin >= 0 && iters > burnin && thin >= 1, "need iters > burnin >= 0 and thin >= 1");
  const auto points = c.integer(sec, "grid_points");
  require(points >= 2, "fit-mixture.grid_points must be at least 2");
  const auto grid = uniform_grid(c.real(sec, "grid_lo"), c.real(sec, "grid_hi"), static_cast<std::size_t>(points));
  require(ctx.reps >= 1, "run.reps must be positive");

  MsbpModel model;
  HyperPrior hyper;
  model.marg = prior == "py" ? pitman_yor_checked(sigma, theta) : pitman_yor_checked(0.0, theta);
  if (prior == "dp" || prior == "py") {
    model.trans = TransitionSpec::independent();
  } else if (prior == "geometric") {
    model.trans = TransitionSpec::completely_dependent();
  } else if (prior == "lazy") {
    const double rho = c.real(sec, "rho");
    require(rho >= 0.0 && rho <= 1.0, "fit-mixture.rho must lie in [0, 1]");
    model.trans = TransitionSpec::lazy(rho);
    if (dep_prior == "uniform") hyper = HyperPrior::beta_rho(1.0, 1.0);
  } else if (prior == "bmsb") {
    const auto N = c.integer(sec, "N");
    const auto n_max = c.integer(sec, "n_max");
    require(N >= 0 && n_max >= 0 && N <= n_max, "fit-mixture needs 0 <= N <= n_max");
    model.trans = TransitionSpec::beta_binomial(static_cast<int>(N));
    if (dep_prior == "uniform") hyper = HyperPrior::uniform_n(static_cast<int>(n_max));
  } else {
    throw ConfigError("fit-mixture.prior must be one of dp, py, geometric, lazy, bmsb");
  }

  const std::string data_path = c.text(sec, "data");
  std::vector<double> file_data;
  if (!data_path.empty()) file_data = read_data_column(data_path);
  const auto n_gen = c.integer(sec, "n");
  require(!data_path.empty() || n_gen >= 1, "fit-mixture.n must be positive");
  std::string truth = c.text(sec, "truth");
  if (truth == "auto") truth = data_path.empty() ? "benchmark" : "none";
  require(truth == "benchmark" || truth == "none", "fit-mixture.truth must be auto, benchmark or none");
  const GaussianMixture bench = eight_gaussian_benchmark();
  const std::string mu0_text = c.text(sec, "mu0");
  std::optional<double> mu0_fixed;
  if (mu0_text != "data-mean") mu0_fixed = parse_double(mu0_text, sec + ".mu0");

  NormalGamma base_prior;
  base_prior.lambda0 = c.real(sec, "lambda0");
  base_prior.a0 = c.real(sec, "a0");
  base_prior.b0 = c.real(sec, "b0");
  try {
    base_prior.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fit-mixture: ") + e.what());
  }

  std::optional<DensityEstimate> truth_density;
  if (truth == "benchmark") truth_density = bench.density(grid);

  const Rng rng0(ctx.seed);
  std::vector<ReplicateResult> results(ctx.reps);
  std::vector<DensityEstimate> densities(ctx.reps);
  parallel_for(ctx.reps, ctx.threads, [&](std::size_t r) {
    const auto t0 = std::chrono::steady_clock::now();
    const Rng rr = rng0.split(r);
    MixtureSpec spec;
    spec.model = model;
    spec.hyper_prior = hyper;
    spec.base = base_prior;
    if (data_path.empty()) {
      Rng dr = rr.split(0);
      spec.data = bench.sample(static_cast<std::size_t>(n_gen), dr);
    } else {
      spec.data = file_data;
    }
    if (mu0_fixed) {
      spec.base.mu0 = *mu0_fixed;
    } else if (!spec.data.empty()) {
      double s = 0.0;
      for (double y : spec.data) s += y;
      spec.base.mu0 = s / static_cast<double>(spec.data.size());
    }
    Rng chain = rr.split(1);
    const auto draws = fit(spec, static_cast<std::size_t>(iters), static_cast<std::size_t>(burnin),
                           static_cast<std::size_t>(thin), chain);
    if (draws.empty()) throw ConfigError("fit-mixture: no draws kept; increase iters or reduce thin");
    ReplicateResult res;
    res.n = spec.data.size();
    densities[r] = density_estimate(draws, spec, grid);
    if (truth_density) res.tv = tv_distance(densities[r], *truth_density);
    res.kn_pmf = posterior_Kn(draws);
    if (!spec.data.empty()) res.clustering = binder_cluster_estimate(draws);
    res.runtime_s = elapsed_ms(t0) / 1000.0;
    results[r] = std::move(res);
  });

  json reps = json::array();
  MomentAccumulator tv_acc;
  for (std::size_t r = 0; r < ctx.reps; ++r) {
    const std::string name = "density_" + std::to_string(r) + ".csv";
    std::vector<std::string> cols = {"y", "density"};
    if (truth_density) cols.push_back("truth");
    CsvWriter csv(ctx.out / name, ctx.header, cols);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv.cell(grid[i]).cell(densities[r].values[i]);
      if (truth_density) csv.cell(truth_density->values[i]);
      csv.end_row();
    }
    csv.close();
    const auto& res = results[r];
    std::size_t mode = 0;
    for (std::size_t k = 1; k < res.kn_pmf.size(); ++k)
      if (res.kn_pmf[k] > res.kn_pmf[mode]) mode = k;
    json jr{{"replicate", r}, {"n", res.n}, {"density_file", name}};
    if (res.tv) {
      jr["tv"] = *res.tv;
      tv_acc.add(*res.tv);
    }
    jr["kn_pmf"] = res.kn_pmf;
    jr["kn_mode"] = mode;
    jr["clustering"] = res.clustering;
    int clusters = 0;
    for (int lab : res.clustering) clusters = std::max(clusters, lab);
    jr["clusters"] = clusters;
    jr["runtime_s"] = res.runtime_s;
    reps.push_back(jr);
    log << "fit-mixture: replicate " << r << " K_n mode " << mode;
    if (res.tv) log << " TV " << format_double(*res.tv);
    log << "\n";
  }
  json report = ctx.header.json();
  report["sampler"] = json{{"iters", iters}, {"burnin", burnin}, {"thin", thin}};
  report["replicates"] = reps;
  if (tv_acc.count > 0) {
    report["tv_mean"] = tv_acc.mean();
    report["tv_sd"] = tv_acc.count > 1 ? std::sqrt(tv_acc.variance()) : 0.0;
  }
  write_json(ctx.out / "fit.json", report);
  write_manifest(ctx, "fit-mixture", c);
  return kExitOk;
}

// ----------------------------------------------------------- moments-check

int moments_check(const Config& c, std::ostream& log) {
  const std::string sec = "moments-check";
  const RunContext ctx = context_of(c);
  const auto configs = c.integer(sec, "configs");
  const auto kappa_max = c.integer(sec, "kappa_max");
  const auto count_max = c.integer(sec, "count_max");
  const auto n_max = c.integer(sec, "n_max");
  const double eps = c.real(sec, "endpoint_eps");
  require(configs >= 1 && kappa_max >= 1 && kappa_max <= 20 && count_max >= 1 && n_max >= 0,
          "moments-check needs configs >= 1, 1 <= kappa_max <= 20, count_max >= 1, n_max >= 0");
  require(eps > 0.0 && eps < 0.5, "moments-check.endpoint_eps must lie in (0, 0.5)");
  require(ctx.reps >= 100, "run.reps must be at least 100");
  const Rng base(ctx.seed);

  CsvWriter csv(ctx.out / "moments_check.csv", ctx.header,
                {"family", "config", "alpha", "beta", "dependence", "counts", "closed_form", "mc", "std_error", "z"});
  bool all = true;
  double worst_z = 0.0;
  double worst_endpoint = 0.0;
  for (int fam = 0; fam < 2; ++fam) {
    for (std::int64_t k = 0; k < configs; ++k) {
      Rng cr = base.split(static_cast<std::uint64_t>(fam) * 100000 + static_cast<std::uint64_t>(k));
      const double alpha = 0.5 + 2.5 * cr.uniform();
      const double beta = 0.5 + 3.5 * cr.uniform();
      const std::size_t kappa = 1 + static_cast<std::size_t>(cr.uniform() * static_cast<double>(kappa_max));
      std::vector<int> counts(kappa);
      int total = 0;
      for (auto& a : counts) {
        a = static_cast<int>(cr.uniform() * static_cast<double>(count_max + 1));
        total += a;
      }
      if (total == 0) counts.back() = 1;
      const auto stats = AllocationStats::from_counts(counts);
      MsbpModel model;
      model.marg = MarginalSeq::const_beta(alpha, beta);
      double dep;
      double closed;
      if (fam == 0) {
        const int N = static_cast<int>(cr.uniform() * static_cast<double>(n_max + 1));
        dep = N;
        model.trans = TransitionSpec::beta_binomial(N);
        closed = mixed_moment_bmsb_transfer(alpha, beta, N, stats);
      } else {
        const double rho = cr.uniform();
        dep = rho;
        model.trans = TransitionSpec::lazy(rho);
        closed = mixed_moment_lmsb_recursive(alpha, beta, rho, stats);
        const double e0 = std::fabs(mixed_moment_lmsb_recursive(alpha, beta, eps, stats) -
                                    mixed_moment_lmsb_recursive(alpha, beta, 0.0, stats));
        const double e1 = std::fabs(mixed_moment_lmsb_recursive(alpha, beta, 1.0 - eps, stats) -
                                    mixed_moment_lmsb_recursive(alpha, beta, 1.0, stats));
        worst_endpoint = std::max({worst_endpoint, e0, e1});
      }
      const Estimate mc = mc_estimate(ctx.reps, cr.split(1), ctx.threads, [&](Rng& r) {
        const LengthPrefix p = sample_prefix(model, kappa, r);
        return std::exp(allocation_logprob_given_v(p, stats));
      });
      const double z = mc.std_error > 0.0 ? (mc.value - closed) / mc.std_error : (mc.value == closed ? 0.0 : INFINITY);
      worst_z = std::max(worst_z, std::fabs(z));
      all = all && std::fabs(z) <= 3.0;
      std::string cs;
      for (std::size_t j = 0; j < counts.size(); ++j) cs += (j ? " " : "") + std::to_string(counts[j]);
      csv.cell(std::string(fam == 0 ? "bmsb" : "lmsb")).cell(k).cell(alpha).cell(beta).cell(dep).cell(cs).cell(
          closed).cell(mc.value).cell(mc.std_error).cell(z);
      csv.end_row();
    }
  }
  csv.close();
  const bool endpoints_ok = worst_endpoint <= 1e-6;
  all = all && endpoints_ok;
  json report = ctx.header.json();
  report["max_abs_z"] = worst_z;
  report["z_threshold"] = 3.0;
  report["lmsb_endpoint_gap"] = worst_endpoint;
  report["endpoint_threshold"] = 1e-6;
  report["passed"] = all;
  write_json(ctx.out / "moments_check.json", report);
  write_manifest(ctx, "moments-check", c);
  log << "moments-check: max |z| " << format_double(worst_z) << ", endpoint gap " << format_double(worst_endpoint)
      << (all ? " PASS" : " FAIL") << "\n";
  return all ? kExitOk : kExitValidation;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"prior-curves", "validate", "fit-mixture", "moments-check"};
  return names;
}

Config resolve_command_config(const std::string& command, const CommandOptions& opts) {
  const Schema schema = schema_for(command);
  RawSections raw;
  if (opts.config_path) raw = load_config_file(*opts.config_path);
  Config c = Config::resolve(schema, raw);
  if (opts.seed) c.set(kRun, "seed", std::to_string(*opts.seed));
  if (opts.reps) c.set(kRun, "reps", std::to_string(*opts.reps));
  if (opts.out) c.set(kRun, "out", *opts.out);
  if (opts.threads) c.set(kRun, "threads", std::to_string(*opts.threads));
  for (const auto& kv : opts.set) {
    const auto eq = kv.find('=');
    const auto dot = kv.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    // Sections may contain dashes but not dots, so the first dot splits.
    c.set(kv.substr(0, dot), kv.substr(dot + 1, eq - dot - 1), kv.substr(eq + 1));
  }
  return c;
}

int cmd_prior_curves(const Config& config, std::ostream& log) { return prior_curves(config, log); }
int cmd_validate(const Config& config, std::ostream& log) { return validate(config, log); }
int cmd_fit_mixture(const Config& config, std::ostream& log) { return fit_mixture(config, log); }
int cmd_moments_check(const Config& config, std::ostream& log) { return moments_check(config, log); }

int run_command(const std::string& command, const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  try {
    const Config c = resolve_command_config(command, opts);
    if (command == "prior-curves") return cmd_prior_curves(c, log);
    if (command == "validate") return cmd_validate(c, log);
    if (command == "fit-mixture") return cmd_fit_mixture(c, log);
    if (command == "moments-check") return cmd_moments_check(c, log);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace msbp::cli
