// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/network.hpp"

#include <array>

#include "mcfnet/errors.hpp"
#include "mcfnet/nn/ops.hpp"

namespace mcfnet {

using nn::Var;

Networks::Networks(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  nn::Rng rng(seed);
  if (config_.use_hsv_cfem) {
    cfem_net_.emplace(cfem_, config_, rng);
  }
  grm_net_ = Grm(grm_, config_, rng);
  fusion_net_ = FusionModule(fusion_, config_, rng);
  gb_net_ = GbUnet(gb_, config_, rng);
  da_net_ = PatchDiscriminator(da_, 3, config_.disc_width, rng);
  db_net_ = PatchDiscriminator(db_, 1, config_.disc_width, rng);
}

Var nir_to_hsv(const Var& nir) {
  const nn::Shape s = nir.shape();
  if (s.c != 1) {
    throw ShapeError("nir_to_hsv: expected a 1-channel input, got " + s.str());
  }
  const Var zero = nn::zeros(s);
  const std::array<Var, 3> parts{zero, zero, nir};
  return nn::concat_channels(parts);
}

ColorizerOutput Networks::colorize(const Var& nir) const {
  const nn::Shape s = nir.shape();
  if (s.c != 1) {
    throw ShapeError("colorize: expected a 1-channel NIR input, got " + s.str());
  }
  require_divisible_by_8(s.h, s.w, "colorize");

  ColorizerOutput out;
  out.x_hsv = nir_to_hsv(nir);
  out.y_tex = config_.use_texture ? nn::laplacian(nir) : nn::zeros(s);

  if (cfem_net_) {
    CfemFeatures f = cfem_net_->forward(out.x_hsv);
    out.y_hsv = f.y_hsv;
    out.pyramid = f.pyramid;
  } else {
    out.y_hsv = nn::zeros({s.n, 3, s.h, s.w});
  }

  GrmFeatures g = grm_net_.forward(nir, out.pyramid ? &*out.pyramid : nullptr);
  out.y_prime_rgb = g.y_prime_rgb;
  out.taps = g.taps;
  out.y_rgb = fusion_net_.forward(out.y_prime_rgb, out.y_tex, out.y_hsv);
  return out;
}

std::vector<nn::ParamGroup*> Networks::all_groups() {
  return {&grm_, &cfem_, &fusion_, &gb_, &da_, &db_};
}

std::vector<const nn::ParamGroup*> Networks::all_groups() const {
  return {&grm_, &cfem_, &fusion_, &gb_, &da_, &db_};
}

std::vector<nn::ParamGroup*> Networks::generator_groups() {
  std::vector<nn::ParamGroup*> out;
  for (nn::ParamGroup* g : {&grm_, &cfem_, &fusion_, &gb_}) {
    if (!g->params().empty()) out.push_back(g);
  }
  return out;
}

std::vector<nn::ParamGroup*> Networks::discriminator_groups() { return {&da_, &db_}; }

std::vector<std::string> Networks::trainable_group_names() const {
  std::vector<std::string> names;
  for (const nn::ParamGroup* g : all_groups()) {
    if (!g->params().empty()) names.push_back(g->name());
  }
  return names;
}

nn::ParamGroup* Networks::group(const std::string& name) {
  for (nn::ParamGroup* g : all_groups()) {
    if (g->name() == name) return g;
  }
  return nullptr;
}

const nn::ParamGroup* Networks::group(const std::string& name) const {
  for (const nn::ParamGroup* g : all_groups()) {
    if (g->name() == name) return g;
  }
  return nullptr;
}

std::size_t Networks::parameter_count() const {
  std::size_t total = 0;
  for (const nn::ParamGroup* g : all_groups()) total += g->numel();
  return total;
}

std::vector<Var> collect_params(const std::vector<nn::ParamGroup*>& groups) {
  std::vector<Var> out;
  for (const nn::ParamGroup* g : groups) {
    for (const auto& p : g->params()) out.push_back(p.var);
  }
  return out;
}

}  // namespace mcfnet
