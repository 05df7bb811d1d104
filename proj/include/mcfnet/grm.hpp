// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "mcfnet/blocks.hpp"
#include "mcfnet/cfem.hpp"
#include "mcfnet/image.hpp"
#include "mcfnet/model_config.hpp"
#include "mcfnet/nn/layers.hpp"

namespace mcfnet {

/// Decoder feature maps; y_k lives at (H, W) / 2^(k-1).
struct DecoderTaps {
  nn::Var y1;
  nn::Var y2;
  nn::Var y3;
  nn::Var y4;
};

struct GrmFeatures {
  nn::Var y_prime_rgb;  // Nx3xHxW in [0,1]
  DecoderTaps taps;
};

/// Geometry reconstruction U-Net. Four encoder stages reach H/8. The decoder
/// adds long bilinear skips (y4 x4 into y2; y3 x4 and y4 x8 into y1) when
/// multiscale is on, and SPADE-modulates the inputs of the y4, y3 and y1
/// blocks with the color pyramid when injection is built.
class Grm {
 public:
  Grm() = default;
  Grm(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng);

  /// `pyramid` may be null: every injection site then applies plain
  /// normalisation, which is the zero-modulation limit of SPADE.
  GrmFeatures forward(const nn::Var& nir, const ColorPyramidVars* pyramid) const;

  bool has_injection() const { return spade4_.has_value(); }
  bool multiscale() const { return multiscale_; }

 private:
  nn::Var site(const nn::Var& x, const nn::Var* guidance,
               const std::optional<SpadeParams>& spade) const;

  bool multiscale_ = true;
  nn::Conv2d enc1_, enc2_, enc3_, enc4_;
  nn::Conv2d dec4_, dec3_, dec2_, dec1_;
  nn::ConvTranspose2d up3_, up2_, up1_;
  nn::Conv2d head_;
  std::optional<SpadeParams> spade4_, spade3_, spade1_;
};

/// Reverse generator RGB -> NIR: plain U-Net, no injection, no long skips.
class GbUnet {
 public:
  GbUnet() = default;
  GbUnet(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng);

  nn::Var forward(const nn::Var& rgb) const;

 private:
  nn::Conv2d enc1_, enc2_, enc3_, enc4_;
  nn::Conv2d dec4_, dec3_, dec2_, dec1_;
  nn::ConvTranspose2d up3_, up2_, up1_;
  nn::Conv2d head_;
};

struct GrmOutput {
  ImagePlane y_prime_rgb;
  nn::Tensor y1, y2, y3, y4;
};

GrmOutput grm_forward(const ImagePlane& nir, const ColorFeaturePyramid* pyramid, const Grm& grm);

ImagePlane gb_forward(const ImagePlane& rgb, const GbUnet& gb);

}  // namespace mcfnet
