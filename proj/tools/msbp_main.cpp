// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include <CLI11.hpp>

#include "msbp/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Markov stick-breaking process experiments"};
  app.set_version_flag("--version", std::string("msbp ") + MSBP_VERSION);
  app.require_subcommand(1);

  msbp::cli::CommandOptions opts;
  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t reps = 0;
  std::string out;
  int threads = 0;

  const char* help[] = {
      "tie probability and K_n curves over theta and dependence grids",
      "closed-form versus Monte Carlo oracle battery",
      "ordered allocation sampler for a Gaussian mixture",
      "mixed moments of the length variables versus Monte Carlo",
  };
  std::size_t h = 0;
  for (const auto& name : msbp::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, help[h++]);
    sub->add_option("--config", config, "INI config or a run manifest")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--reps", reps, "Monte Carlo replicates (fit-mixture: replicate fits)");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads; MSBP_THREADS is the fallback")->check(CLI::NonNegativeNumber);
    sub->add_option("--set", opts.set, "override as section.key=value");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : msbp::cli::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--config")) opts.config_path = config;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--reps")) opts.reps = reps;
  if (sub->count("--out")) opts.out = out;
  if (sub->count("--threads")) opts.threads = threads;
  return msbp::cli::run_command(sub->get_name(), opts, std::cout, std::cerr);
}
