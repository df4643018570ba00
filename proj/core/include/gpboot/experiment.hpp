// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace gpboot {

/// Parsed experiment configuration. The JSON mirror has the shape
///   { "experiment": "...", "seed": <u64>, "out": "dir", "threads": <n>,
///     "params": { ... } }
/// seed is mandatory: runs are reproducible by construction, never
/// wall-clock seeded.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 1;
  nlohmann::json params;

  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig from_file(const std::string& path);

  nlohmann::json to_json() const;
};

/// Runs the configured experiment and writes
/// <out>/<experiment>_report.json (plus optional CSV tables). Returns 0 on
/// completion with all property checks passing, 2 when a check fails.
/// Throws ConfigInvalid (mapped to exit code 1 by the CLI) on bad input.
int run(const ExperimentConfig& config);

}  // namespace gpboot
