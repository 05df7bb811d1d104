// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "mcfnet/errors.hpp"
#include "mcfnet/trainer.hpp"

namespace mcfnet {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

json model_json(const ModelConfig& m) {
  return {{"grm_width", m.grm_width},         {"cfem_width", m.cfem_width},
          {"color_features", m.color_features}, {"spade_hidden", m.spade_hidden},
          {"fusion_width", m.fusion_width},   {"gb_width", m.gb_width},
          {"disc_width", m.disc_width},       {"use_texture", m.use_texture},
          {"use_multiscale", m.use_multiscale}, {"use_hsv_cfem", m.use_hsv_cfem}};
}

ModelConfig model_from(const json& j, ModelConfig m) {
  reject_unknown(j,
                 {"grm_width", "cfem_width", "color_features", "spade_hidden", "fusion_width",
                  "gb_width", "disc_width", "use_texture", "use_multiscale", "use_hsv_cfem"},
                 "model");
  read(j, "grm_width", m.grm_width, "model");
  read(j, "cfem_width", m.cfem_width, "model");
  read(j, "color_features", m.color_features, "model");
  read(j, "spade_hidden", m.spade_hidden, "model");
  read(j, "fusion_width", m.fusion_width, "model");
  read(j, "gb_width", m.gb_width, "model");
  read(j, "disc_width", m.disc_width, "model");
  read(j, "use_texture", m.use_texture, "model");
  read(j, "use_multiscale", m.use_multiscale, "model");
  read(j, "use_hsv_cfem", m.use_hsv_cfem, "model");
  return m;
}

json augment_json(const AugmentSpec& a) {
  return {{"resize_min", a.resize_min},     {"resize_max", a.resize_max},
          {"crop_size", a.crop_size},       {"random_crop", a.random_crop},
          {"contrast_min", a.contrast_min}, {"contrast_max", a.contrast_max},
          {"mirror_prob", a.mirror_prob}};
}

AugmentSpec augment_from(const json& j, AugmentSpec a) {
  reject_unknown(j,
                 {"resize_min", "resize_max", "crop_size", "random_crop", "contrast_min",
                  "contrast_max", "mirror_prob"},
                 "augment_spec");
  read(j, "resize_min", a.resize_min, "augment_spec");
  read(j, "resize_max", a.resize_max, "augment_spec");
  read(j, "crop_size", a.crop_size, "augment_spec");
  read(j, "random_crop", a.random_crop, "augment_spec");
  read(j, "contrast_min", a.contrast_min, "augment_spec");
  read(j, "contrast_max", a.contrast_max, "augment_spec");
  read(j, "mirror_prob", a.mirror_prob, "augment_spec");
  return a;
}

}  // namespace

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.total_epochs = 200;
  c.stage1_end = 150;
  c.batch_size = 1;
  c.model = ModelConfig::desk();
  c.augment = false;
  c.augment_spec = AugmentSpec::desk();
  return c;
}

void TrainConfig::validate() const {
  if (!(0 < stage1_end && stage1_end < total_epochs)) {
    throw ConfigError("need 0 < stage1_end < total_epochs, got stage1_end=" +
                      std::to_string(stage1_end) +
                      " total_epochs=" + std::to_string(total_epochs));
  }
  if (batch_size < 1) {
    throw ConfigError("batch_size must be positive");
  }
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) {
    throw ConfigError("base_lr must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0,1)");
  }
  if (!(lr_decay.floor > 0.0 && lr_decay.floor <= 1.0)) {
    throw ConfigError("lr_decay.floor must lie in (0,1]");
  }
  weights.validate();
  model.validate();
  augment_spec.validate();
}

json to_json(const TrainConfig& c) {
  return {{"total_epochs", c.total_epochs},
          {"stage1_end", c.stage1_end},
          {"batch_size", c.batch_size},
          {"base_lr", c.base_lr},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"lr_decay",
           {{"kind", c.lr_decay.kind == LrSchedule::Kind::kLinear ? "linear" : "constant"},
            {"floor", c.lr_decay.floor}}},
          {"weights",
           {{"lambda_cyc", c.weights.lambda_cyc},
            {"lambda_pair", c.weights.lambda_pair},
            {"lambda_edge", c.weights.lambda_edge}}},
          {"model", model_json(c.model)},
          {"augment", c.augment},
          {"augment_spec", augment_json(c.augment_spec)},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  reject_unknown(j,
                 {"total_epochs", "stage1_end", "batch_size", "base_lr", "beta1", "beta2",
                  "lr_decay", "weights", "model", "augment", "augment_spec", "seed"},
                 "config");
  read(j, "total_epochs", c.total_epochs, "config");
  read(j, "stage1_end", c.stage1_end, "config");
  read(j, "batch_size", c.batch_size, "config");
  read(j, "base_lr", c.base_lr, "config");
  read(j, "beta1", c.beta1, "config");
  read(j, "beta2", c.beta2, "config");
  read(j, "augment", c.augment, "config");
  read(j, "seed", c.seed, "config");
  if (j.contains("lr_decay")) {
    const json& d = j["lr_decay"];
    reject_unknown(d, {"kind", "floor"}, "lr_decay");
    std::string kind = c.lr_decay.kind == LrSchedule::Kind::kLinear ? "linear" : "constant";
    read(d, "kind", kind, "lr_decay");
    if (kind == "linear") {
      c.lr_decay.kind = LrSchedule::Kind::kLinear;
    } else if (kind == "constant") {
      c.lr_decay.kind = LrSchedule::Kind::kConstant;
    } else {
      throw ConfigError("lr_decay.kind: expected 'linear' or 'constant', got '" + kind + "'");
    }
    read(d, "floor", c.lr_decay.floor, "lr_decay");
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    reject_unknown(w, {"lambda_cyc", "lambda_pair", "lambda_edge"}, "weights");
    read(w, "lambda_cyc", c.weights.lambda_cyc, "weights");
    read(w, "lambda_pair", c.weights.lambda_pair, "weights");
    read(w, "lambda_edge", c.weights.lambda_edge, "weights");
  }
  if (j.contains("model")) {
    c.model = model_from(j["model"], c.model);
  }
  if (j.contains("augment_spec")) {
    c.augment_spec = augment_from(j["augment_spec"], c.augment_spec);
  }
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return train_config_from_json(j, std::move(base));
}

double lr_at_epoch(int epoch, const TrainConfig& config) {
  if (epoch < 1 || epoch > config.total_epochs) {
    throw RangeError("lr_at_epoch: epoch " + std::to_string(epoch) + " outside [1, " +
                     std::to_string(config.total_epochs) + "]");
  }
  if (epoch <= config.stage1_end || config.lr_decay.kind == LrSchedule::Kind::kConstant) {
    return config.base_lr;
  }
  const double frac = static_cast<double>(epoch - config.stage1_end) /
                      static_cast<double>(config.total_epochs - config.stage1_end);
  return config.base_lr * (1.0 - (1.0 - config.lr_decay.floor) * frac);
}

}  // namespace mcfnet
