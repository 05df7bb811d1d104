// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/cfem.hpp"

#include <string>

#include "mcfnet/errors.hpp"
#include "mcfnet/image_tensor.hpp"
#include "mcfnet/nn/ops.hpp"

namespace mcfnet {

using nn::Var;

void require_divisible_by_8(int height, int width, const char* what) {
  if (height < 8 || width < 8 || height % 8 != 0 || width % 8 != 0) {
    throw ShapeError(std::string(what) + ": spatial size " + std::to_string(height) + "x" +
                     std::to_string(width) + " must be a positive multiple of 8");
  }
}

Cfem::Cfem(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng) {
  const int w = config.cfem_width;
  const int k = config.color_features;
  stem_ = nn::make_conv(group, "stem", 3, w, 3, 1, 1, rng);
  down1_ = nn::make_conv(group, "down1", w, 2 * w, 4, 2, 1, rng);
  down2_ = nn::make_conv(group, "down2", 2 * w, 4 * w, 4, 2, 1, rng);
  down3_ = nn::make_conv(group, "down3", 4 * w, 8 * w, 4, 2, 1, rng);
  mid_ = nn::make_conv(group, "mid", 8 * w, 8 * w, 3, 1, 1, rng);
  up3_ = nn::make_up_conv(group, "up3", 8 * w, 4 * w, rng);
  up2_ = nn::make_up_conv(group, "up2", 4 * w, 2 * w, rng);
  up1_ = nn::make_up_conv(group, "up1", 2 * w, w, rng);
  proj_eighth_ = nn::make_conv(group, "proj_eighth", 8 * w, k, 1, 1, 0, rng);
  proj_quarter_ = nn::make_conv(group, "proj_quarter", 4 * w, k, 1, 1, 0, rng);
  proj_full_ = nn::make_conv(group, "proj_full", w, k, 1, 1, 0, rng);
  head_ = nn::make_conv(group, "head", w, 3, 3, 1, 1, rng);
}

CfemFeatures Cfem::forward(const Var& x_hsv) const {
  const nn::Shape s = x_hsv.shape();
  if (s.c != 3) {
    throw ShapeError("cfem_forward: expected a 3-channel HSV input, got " + s.str());
  }
  require_divisible_by_8(s.h, s.w, "cfem_forward");

  Var h = nn::leaky_relu(stem_(x_hsv));
  h = nn::leaky_relu(nn::instance_norm(down1_(h)));
  h = nn::leaky_relu(nn::instance_norm(down2_(h)));
  h = nn::leaky_relu(nn::instance_norm(down3_(h)));

  const Var d8 = nn::relu(nn::instance_norm(mid_(h)));
  const Var d4 = nn::relu(nn::instance_norm(up3_(d8)));
  const Var d2 = nn::relu(nn::instance_norm(up2_(d4)));
  const Var d1 = nn::relu(nn::instance_norm(up1_(d2)));

  CfemFeatures out;
  out.pyramid.eighth = proj_eighth_(d8);
  out.pyramid.quarter = proj_quarter_(d4);
  out.pyramid.full = proj_full_(d1);
  out.y_hsv = nn::sigmoid(head_(d1));
  return out;
}

CfemOutput cfem_forward(const ImagePlane& x_hsv, const Cfem& cfem) {
  if (x_hsv.space() != ColorSpace::kHsv) {
    throw ShapeError("cfem_forward: expected an HSV plane, got " +
                     std::string(to_string(x_hsv.space())));
  }
  const CfemFeatures f = cfem.forward(Var::constant(to_tensor(x_hsv)));
  return {to_plane(f.y_hsv.value(), 0, ColorSpace::kHsv),
          {f.pyramid.full.value(), f.pyramid.quarter.value(), f.pyramid.eighth.value()}};
}

}  // namespace mcfnet
