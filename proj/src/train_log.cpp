// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <iomanip>
#include <string>

#include "mcfnet/errors.hpp"
#include "mcfnet/trainer.hpp"

namespace mcfnet {

namespace {

std::string join(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    s += (i ? ";" : "") + ids[i];
  }
  return s;
}

}  // namespace

std::string to_string(BatchMode mode) {
  return mode == BatchMode::kPaired ? "paired" : "unpaired";
}

TrainLogWriter::TrainLogWriter(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  csv_.open(dir / "train_log.csv", std::ios::trunc);
  jsonl_.open(dir / "train_log.jsonl", std::ios::trunc);
  batches_.open(dir / "batches.csv", std::ios::trunc);
  if (!csv_ || !jsonl_ || !batches_) {
    throw DataError("cannot create training logs in " + dir.string());
  }
  csv_ << std::setprecision(10);
  batches_ << std::setprecision(10);
  csv_ << "epoch,lr,g_gan,g_pair,g_cyc,g_edge,g_total,d_a,d_b\n";
  batches_ << "epoch,step,mode,nir_ids,rgb_ids,g_total\n";
}

void TrainLogWriter::epoch(const EpochLog& log) {
  const LossBreakdown& g = log.mean.generator;
  csv_ << log.epoch << ',' << log.lr << ',' << g.gan << ',' << g.pair << ',' << g.cyc << ','
       << g.edge << ',' << g.total << ',' << log.mean.d_a << ',' << log.mean.d_b << '\n';
  const nlohmann::json j = {{"epoch", log.epoch},
                            {"lr", log.lr},
                            {"g_gan", g.gan},
                            {"g_pair", g.pair},
                            {"g_cyc", g.cyc},
                            {"g_edge", g.edge},
                            {"g_total", g.total},
                            {"d_a", log.mean.d_a},
                            {"d_b", log.mean.d_b},
                            {"paired_batches", log.paired_batches},
                            {"unpaired_batches", log.unpaired_batches}};
  jsonl_ << j.dump() << '\n';
  csv_.flush();
  jsonl_.flush();
}

void TrainLogWriter::batch(const BatchRecord& rec) {
  batches_ << rec.epoch << ',' << rec.step << ',' << to_string(rec.mode) << ','
           << join(rec.nir_ids) << ',' << join(rec.rgb_ids) << ','
           << rec.losses.generator.total << '\n';
}

}  // namespace mcfnet
