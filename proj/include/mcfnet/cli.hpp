// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcfnet/trainer.hpp"

namespace mcfnet::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericFailure = 3,
};

/// Environment variable consulted when neither a flag nor the config file
/// sets the seed.
inline constexpr const char* kSeedEnv = "MCFNET_SEED";

struct RunManifest {
  std::string command;
  std::string config_path;
  nlohmann::json config;  // resolved TrainConfig, or the command's options
  std::string git_describe;
  std::string timestamp;  // UTC, ISO 8601
  std::uint64_t seed = 0;
  std::vector<std::string> trainable_groups;  // train / ablate only

  nlohmann::json to_json() const;
};

/// Writes `<out_dir>/manifest.json`.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

/// Applies an ablation variant: no-texture, no-multiscale, no-cfem or full.
/// Throws ConfigError on unknown names.
void apply_variant(ModelConfig& model, const std::string& variant);

/// Runs one subcommand. argv[0] is the program name.
int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace mcfnet::cli
