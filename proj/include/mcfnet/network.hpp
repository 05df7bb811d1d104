// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcfnet/blocks.hpp"
#include "mcfnet/cfem.hpp"
#include "mcfnet/grm.hpp"
#include "mcfnet/model_config.hpp"
#include "mcfnet/nn/layers.hpp"

namespace mcfnet {

/// Every intermediate of one colorization pass.
struct ColorizerOutput {
  nn::Var y_rgb;        // final fused image
  nn::Var y_prime_rgb;  // geometry branch
  nn::Var y_hsv;        // HSV branch (zeros when the branch is disabled)
  nn::Var y_tex;        // texture map (zeros when disabled)
  nn::Var x_hsv;        // HSV encoding of the replicated input
  std::optional<ColorPyramidVars> pyramid;
  DecoderTaps taps;
};

/// Trainable state of the whole system: the colorization network C_A
/// (groups grm, cfem, fusion), the reverse generator G_B (gb) and the two
/// discriminators (da judges RGB, db judges NIR).
///
/// Moving keeps parameter identity; copying is disabled because layers
/// share parameter handles with their groups.
class Networks {
 public:
  Networks(const ModelConfig& config, std::uint64_t seed);
  Networks(Networks&&) = default;
  Networks& operator=(Networks&&) = default;
  Networks(const Networks&) = delete;
  Networks& operator=(const Networks&) = delete;

  const ModelConfig& config() const { return config_; }

  /// C_A: texture, HSV and geometry branches fused into y_rgb. x: Nx1xHxW.
  ColorizerOutput colorize(const nn::Var& nir) const;
  /// G_B.
  nn::Var restore_nir(const nn::Var& rgb) const { return gb_net_.forward(rgb); }
  /// D_A on RGB images.
  nn::Var judge_rgb(const nn::Var& rgb) const { return da_net_.forward(rgb); }
  /// D_B on NIR images.
  nn::Var judge_nir(const nn::Var& nir) const { return db_net_.forward(nir); }

  const Cfem* cfem() const { return cfem_net_ ? &*cfem_net_ : nullptr; }
  const Grm& grm() const { return grm_net_; }
  const FusionModule& fusion() const { return fusion_net_; }
  const GbUnet& gb() const { return gb_net_; }
  const PatchDiscriminator& da() const { return da_net_; }
  const PatchDiscriminator& db() const { return db_net_; }

  /// All groups in a fixed order: grm, cfem, fusion, gb, da, db.
  std::vector<nn::ParamGroup*> all_groups();
  std::vector<const nn::ParamGroup*> all_groups() const;
  /// Non-empty generator groups (C_A and G_B).
  std::vector<nn::ParamGroup*> generator_groups();
  std::vector<nn::ParamGroup*> discriminator_groups();
  /// Names of groups that hold trainable parameters under this config.
  std::vector<std::string> trainable_group_names() const;

  nn::ParamGroup* group(const std::string& name);
  const nn::ParamGroup* group(const std::string& name) const;

  std::size_t parameter_count() const;

 private:
  ModelConfig config_;
  nn::ParamGroup grm_{"grm"};
  nn::ParamGroup cfem_{"cfem"};
  nn::ParamGroup fusion_{"fusion"};
  nn::ParamGroup gb_{"gb"};
  nn::ParamGroup da_{"da"};
  nn::ParamGroup db_{"db"};

  std::optional<Cfem> cfem_net_;
  Grm grm_net_;
  FusionModule fusion_net_;
  GbUnet gb_net_;
  PatchDiscriminator da_net_;
  PatchDiscriminator db_net_;
};

/// Collects the parameter handles of `groups` in order.
std::vector<nn::Var> collect_params(const std::vector<nn::ParamGroup*>& groups);

/// HSV encoding of a replicated NIR batch inside the graph. Equals
/// rgb_to_hsv(replicate_nir(x)): hue 0, saturation 0, value x.
nn::Var nir_to_hsv(const nn::Var& nir);

}  // namespace mcfnet
