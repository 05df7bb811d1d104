// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcfnet/data.hpp"
#include "mcfnet/losses.hpp"
#include "mcfnet/model_config.hpp"
#include "mcfnet/network.hpp"
#include "mcfnet/nn/adam.hpp"

namespace mcfnet {

struct LrSchedule {
  enum class Kind { kLinear, kConstant };
  Kind kind = Kind::kLinear;
  double floor = 0.01;  // final fraction of base_lr for kLinear

  bool operator==(const LrSchedule&) const = default;
};

struct TrainConfig {
  int total_epochs = 1000;
  int stage1_end = 250;  // last paired-only epoch
  int batch_size = 1;
  double base_lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  LrSchedule lr_decay;
  LossWeights weights;
  ModelConfig model;
  bool augment = true;
  AugmentSpec augment_spec;
  std::uint64_t seed = 0;

  /// 64x64 CPU preset: narrow networks, no augmentation.
  static TrainConfig desk();

  /// Throws ConfigError when an invariant fails.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

nlohmann::json to_json(const TrainConfig& config);
/// Applies the keys present in `j` over `base`; unknown keys are errors.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
TrainConfig load_train_config(const std::filesystem::path& path, TrainConfig base = {});

/// base_lr up to stage1_end, then linear decay reaching floor * base_lr at
/// total_epochs (or constant). Epochs are 1-based.
double lr_at_epoch(int epoch, const TrainConfig& config);

struct StepLosses {
  LossBreakdown generator;
  double d_a = 0.0;  // adversarial value for the RGB discriminator
  double d_b = 0.0;  // adversarial value for the NIR discriminator
};

struct BatchRecord {
  int epoch = 0;
  int step = 0;  // 1-based within the epoch
  BatchMode mode = BatchMode::kPaired;
  std::vector<std::string> nir_ids;
  std::vector<std::string> rgb_ids;
  StepLosses losses;
};

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  StepLosses mean;  // over every batch of the epoch
  int paired_batches = 0;
  int unpaired_batches = 0;
};

struct OptimizerState {
  std::int64_t steps = 0;
  std::vector<nn::Tensor> m;
  std::vector<nn::Tensor> v;
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  TrainConfig config;
  int epoch = 0;
  std::string rng_state;
  /// group name -> (parameter name, value), in network order.
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, nn::Tensor>>>> groups;
  OptimizerState generator_opt;
  OptimizerState discriminator_opt;
};

/// Versioned binary container with a trailing CRC-32, plus a `<path>.json`
/// config sidecar.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Throws CheckpointError on bad magic, version mismatch or checksum failure.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Parameter snapshot of `nets`.
std::vector<std::pair<std::string, std::vector<std::pair<std::string, nn::Tensor>>>>
snapshot_params(const Networks& nets);

/// Copies checkpoint parameters into `nets`. Throws ShapeError naming the
/// group on any missing, extra or mis-shaped parameter.
void load_params(Networks& nets, const Checkpoint& ckpt);

/// Two-stage CycleGAN-style optimisation: paired epochs, then paired and
/// unpaired batches alternating 1:1. Each batch is one generator update
/// followed by one discriminator update.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);

  const TrainConfig& config() const { return config_; }
  Networks& networks() { return nets_; }
  const Networks& networks() const { return nets_; }
  int epoch() const { return epoch_; }

  /// One generator update then one discriminator update. Generator
  /// gradients stay in place afterwards for inspection. Pair and edge terms
  /// apply to paired batches only. Throws NumericError on a non-finite loss.
  StepLosses step(const Batch& batch);

  using BatchCallback = std::function<void(const BatchRecord&)>;
  using EpochCallback = std::function<void(const EpochLog&)>;

  /// Runs the next epoch.
  EpochLog run_epoch(const Dataset& dataset, const BatchCallback& on_batch = {});

  /// Runs the remaining epochs up to total_epochs.
  std::vector<EpochLog> train(const Dataset& dataset, const EpochCallback& on_epoch = {},
                              const BatchCallback& on_batch = {});

  Checkpoint checkpoint() const;
  void restore(const Checkpoint& ckpt);

 private:
  void set_lr(double lr);

  TrainConfig config_;
  Networks nets_;
  nn::Adam g_opt_;
  nn::Adam d_opt_;
  std::mt19937_64 rng_;
  int epoch_ = 0;
};

/// Writes `train_log.csv`, its JSON-lines mirror `train_log.jsonl`, and
/// `batches.csv` (one row per batch with its mode and sample ids).
class TrainLogWriter {
 public:
  explicit TrainLogWriter(const std::filesystem::path& dir);

  void epoch(const EpochLog& log);
  void batch(const BatchRecord& rec);

 private:
  std::ofstream csv_;
  std::ofstream jsonl_;
  std::ofstream batches_;
};

std::string to_string(BatchMode mode);

}  // namespace mcfnet
