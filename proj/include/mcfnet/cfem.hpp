// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mcfnet/image.hpp"
#include "mcfnet/model_config.hpp"
#include "mcfnet/nn/layers.hpp"

namespace mcfnet {

/// Color features at full, 1/4 and 1/8 of the input extent (graph form).
struct ColorPyramidVars {
  nn::Var full;
  nn::Var quarter;
  nn::Var eighth;
};

struct CfemFeatures {
  nn::Var y_hsv;  // Nx3xHxW in [0,1]
  ColorPyramidVars pyramid;
};

/// The HSV color generator: a strided convolutional encoder and mirrored
/// transposed-convolution decoder without skips. It predicts the HSV image
/// of the target and taps the decoder at H/8, H/4 and H through 1x1
/// projections to `color_features` channels.
class Cfem {
 public:
  Cfem() = default;
  Cfem(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng);

  /// x_hsv: Nx3xHxW with H, W divisible by 8.
  CfemFeatures forward(const nn::Var& x_hsv) const;

 private:
  nn::Conv2d stem_, down1_, down2_, down3_, mid_;
  nn::ConvTranspose2d up3_, up2_, up1_;
  nn::Conv2d proj_eighth_, proj_quarter_, proj_full_;
  nn::Conv2d head_;
};

/// Pyramid levels as plain tensors (1 x k x h x w each).
struct ColorFeaturePyramid {
  nn::Tensor full;
  nn::Tensor quarter;
  nn::Tensor eighth;
};

struct CfemOutput {
  ImagePlane y_hsv;
  ColorFeaturePyramid pyramid;
};

/// Runs the generator on one HSV plane built from a replicated NIR image.
CfemOutput cfem_forward(const ImagePlane& x_hsv, const Cfem& cfem);

/// Throws ShapeError unless height and width are positive multiples of 8.
void require_divisible_by_8(int height, int width, const char* what);

}  // namespace mcfnet
