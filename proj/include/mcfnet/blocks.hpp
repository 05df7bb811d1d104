// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mcfnet/image.hpp"
#include "mcfnet/model_config.hpp"
#include "mcfnet/nn/layers.hpp"

namespace mcfnet {

/// Epsilon of the parameter-free normalisation inside SPADE.
inline constexpr double kSpadeEps = 1e-5;

/// One SPADE unit: a shared 3x3 conv + ReLU over the guidance, then 3x3
/// gamma and beta heads producing one map per modulated channel.
struct SpadeParams {
  nn::Conv2d shared;
  nn::Conv2d gamma;
  nn::Conv2d beta;
};

SpadeParams make_spade(nn::ParamGroup& group, const std::string& name, int guidance_channels,
                       int feature_channels, int hidden, nn::Rng& rng);

/// normalize(features) * (1 + gamma(guidance)) + beta(guidance). Guidance is
/// resized bilinearly to the feature extent when they differ.
nn::Var spade_modulate(const nn::Var& features, const nn::Var& guidance,
                       const SpadeParams& params);

/// Refiner that fuses the coarse color image and texture map under HSV
/// guidance: two SPADE-conditioned conv blocks and a sigmoid head.
class FusionModule {
 public:
  FusionModule() = default;
  FusionModule(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng);

  /// y_prime: Nx3, y_tex: Nx1, y_hsv: Nx3, all at one spatial extent.
  nn::Var forward(const nn::Var& y_prime, const nn::Var& y_tex, const nn::Var& y_hsv) const;

 private:
  SpadeParams spade1_;
  SpadeParams spade2_;
  nn::Conv2d conv1_;
  nn::Conv2d conv2_;
  nn::Conv2d head_;
};

/// Patch discriminator with a 70x70 receptive field; emits per-patch
/// probabilities.
class PatchDiscriminator {
 public:
  PatchDiscriminator() = default;
  PatchDiscriminator(nn::ParamGroup& group, int in_channels, int width, nn::Rng& rng);

  nn::Var forward(const nn::Var& img) const;
  int in_channels() const { return in_channels_; }

 private:
  int in_channels_ = 0;
  nn::Conv2d c1_, c2_, c3_, c4_, c5_;
};

/// Real/fake probability map for one image (values in (0,1)).
struct PatchLogits {
  nn::Tensor data;  // 1x1xhxw
  int height() const { return data.shape().h; }
  int width() const { return data.shape().w; }
};

ImagePlane fuse_branches(const ImagePlane& y_prime_rgb, const ImagePlane& y_hsv,
                         const TextureMap& y_tex, const FusionModule& fusion);

PatchLogits discriminate(const ImagePlane& img, const PatchDiscriminator& disc);

}  // namespace mcfnet
