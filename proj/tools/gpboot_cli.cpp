// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: each subcommand reads a JSON experiment config,
// runs it, and writes a machine-readable report. Exit codes: 0 on success,
// 1 on configuration or runtime error, 2 when a property check fails.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpboot/errors.hpp"
#include "gpboot/experiment.hpp"
#include "gpboot/version.hpp"

namespace {

struct SubcommandState {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
  int threads = 0;
  std::vector<std::string> allowed;
};

void add_common_options(CLI::App* cmd, SubcommandState& state) {
  cmd->add_option("--config", state.config_path, "JSON experiment config")
      ->required();
  cmd->add_option("--seed", state.seed, "Override the config seed")
      ->each([&state](const std::string&) { state.seed_set = true; });
  cmd->add_option("--out", state.out_dir, "Override the report directory");
  cmd->add_option("--threads", state.threads,
                  "Worker threads for the Monte Carlo loops");
}

int run_subcommand(const SubcommandState& state) {
  gpboot::ExperimentConfig config =
      gpboot::ExperimentConfig::from_file(state.config_path);
  bool allowed = false;
  for (const auto& id : state.allowed) {
    if (config.experiment == id) allowed = true;
  }
  if (!allowed) {
    throw gpboot::ConfigInvalid("experiment '" + config.experiment +
                                "' does not belong to this subcommand");
  }
  if (state.seed_set) config.seed = state.seed;
  if (!state.out_dir.empty()) config.out_dir = state.out_dir;
  if (state.threads > 0) config.threads = state.threads;
  return gpboot::run(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process bootstrap for suprema of empirical processes"};
  app.set_version_flag("--version", gpboot::kVersion);
  app.require_subcommand(1);

  SubcommandState bootstrap_state, ellipsoid_state, specnorm_state,
      rkhs_state, diag_state;
  bootstrap_state.allowed = {"bootstrap"};
  ellipsoid_state.allowed = {"ellipsoid_coverage"};
  specnorm_state.allowed = {"specnorm_coverage"};
  rkhs_state.allowed = {"rkhs_band"};
  diag_state.allowed = {"berry_esseen", "anticoncentration"};

  add_common_options(
      app.add_subcommand("bootstrap", "Bootstrap sup draws and quantiles"),
      bootstrap_state);
  add_common_options(
      app.add_subcommand("ellipsoid", "Confidence ellipsoid coverage study"),
      ellipsoid_state);
  add_common_options(
      app.add_subcommand("specnorm", "Spectral-norm bootstrap calibration"),
      specnorm_state);
  add_common_options(
      app.add_subcommand("rkhs-band", "Kernel ridge confidence bands"),
      rkhs_state);
  add_common_options(
      app.add_subcommand("diag", "Inequality diagnostics suites"), diag_state);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error maps to exit code 1
    return app.exit(e) == 0 ? 0 : 1;
  }

  const SubcommandState* state = nullptr;
  if (app.got_subcommand("bootstrap")) state = &bootstrap_state;
  if (app.got_subcommand("ellipsoid")) state = &ellipsoid_state;
  if (app.got_subcommand("specnorm")) state = &specnorm_state;
  if (app.got_subcommand("rkhs-band")) state = &rkhs_state;
  if (app.got_subcommand("diag")) state = &diag_state;

  try {
    return run_subcommand(*state);
  } catch (const gpboot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
