// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/grm.hpp"

#include <string>
#include <vector>

#include "mcfnet/errors.hpp"
#include "mcfnet/image_tensor.hpp"
#include "mcfnet/nn/ops.hpp"

namespace mcfnet {

using nn::Var;

namespace {

Var down_block(const nn::Conv2d& conv, const Var& x) {
  return nn::leaky_relu(nn::instance_norm(conv(x)));
}

Var up_block(const nn::Conv2d& conv, const Var& x) {
  return nn::relu(nn::instance_norm(conv(x)));
}

void require_level(const Var& level, int channels, int h, int w, const char* name) {
  const nn::Shape s = level.shape();
  if (s.h != h || s.w != w) {
    throw ShapeError(std::string("grm_forward: pyramid level ") + name + " is " +
                     std::to_string(s.h) + "x" + std::to_string(s.w) + ", expected " +
                     std::to_string(h) + "x" + std::to_string(w));
  }
  if (s.c != channels) {
    throw ShapeError(std::string("grm_forward: pyramid level ") + name + " has " +
                     std::to_string(s.c) + " channels, expected " + std::to_string(channels));
  }
}

}  // namespace

Grm::Grm(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng)
    : multiscale_(config.use_multiscale) {
  const int w = config.grm_width;
  enc1_ = nn::make_conv(group, "enc1", 1, w, 3, 1, 1, rng);
  enc2_ = nn::make_conv(group, "enc2", w, 2 * w, 4, 2, 1, rng);
  enc3_ = nn::make_conv(group, "enc3", 2 * w, 4 * w, 4, 2, 1, rng);
  enc4_ = nn::make_conv(group, "enc4", 4 * w, 8 * w, 4, 2, 1, rng);

  const int in4 = 8 * w;
  const int in3 = 2 * w + 4 * w;
  const int in2 = w + 2 * w + (multiscale_ ? 4 * w : 0);
  const int in1 = w + w + (multiscale_ ? 2 * w + 4 * w : 0);

  if (config.use_hsv_cfem) {
    const int k = config.color_features;
    spade4_ = make_spade(group, "spade4", k, in4, config.spade_hidden, rng);
    spade3_ = make_spade(group, "spade3", k, in3, config.spade_hidden, rng);
    spade1_ = make_spade(group, "spade1", k, in1, config.spade_hidden, rng);
  }

  dec4_ = nn::make_conv(group, "dec4", in4, 4 * w, 3, 1, 1, rng);
  up3_ = nn::make_up_conv(group, "up3", 4 * w, 2 * w, rng);
  dec3_ = nn::make_conv(group, "dec3", in3, 2 * w, 3, 1, 1, rng);
  up2_ = nn::make_up_conv(group, "up2", 2 * w, w, rng);
  dec2_ = nn::make_conv(group, "dec2", in2, w, 3, 1, 1, rng);
  up1_ = nn::make_up_conv(group, "up1", w, w, rng);
  dec1_ = nn::make_conv(group, "dec1", in1, w, 3, 1, 1, rng);
  head_ = nn::make_conv(group, "head", w, 3, 1, 1, 0, rng);
}

Var Grm::site(const Var& x, const Var* guidance, const std::optional<SpadeParams>& spade) const {
  if (guidance != nullptr && spade.has_value()) {
    return spade_modulate(x, *guidance, *spade);
  }
  return nn::instance_norm(x, kSpadeEps);
}

GrmFeatures Grm::forward(const Var& nir, const ColorPyramidVars* pyramid) const {
  const nn::Shape s = nir.shape();
  if (s.c != 1) {
    throw ShapeError("grm_forward: expected a 1-channel NIR input, got " + s.str());
  }
  require_divisible_by_8(s.h, s.w, "grm_forward");
  if (pyramid != nullptr) {
    if (!has_injection()) {
      throw ConfigError("grm_forward: color pyramid given but injection is disabled");
    }
    const int k = spade1_->shared.weight.shape().c;
    require_level(pyramid->full, k, s.h, s.w, "full");
    require_level(pyramid->quarter, k, s.h / 4, s.w / 4, "quarter");
    require_level(pyramid->eighth, k, s.h / 8, s.w / 8, "eighth");
  }
  const Var* g_full = pyramid ? &pyramid->full : nullptr;
  const Var* g_quarter = pyramid ? &pyramid->quarter : nullptr;
  const Var* g_eighth = pyramid ? &pyramid->eighth : nullptr;

  const Var e1 = nn::leaky_relu(enc1_(nir));
  const Var e2 = down_block(enc2_, e1);
  const Var e3 = down_block(enc3_, e2);
  const Var e4 = down_block(enc4_, e3);

  GrmFeatures out;
  DecoderTaps& t = out.taps;
  t.y4 = up_block(dec4_, site(e4, g_eighth, spade4_));

  {
    const std::vector<Var> parts{up3_(t.y4), e3};
    t.y3 = up_block(dec3_, site(nn::concat_channels(parts), g_quarter, spade3_));
  }
  {
    std::vector<Var> parts{up2_(t.y3), e2};
    if (multiscale_) parts.push_back(nn::resize_bilinear(t.y4, s.h / 2, s.w / 2));
    t.y2 = up_block(dec2_, nn::concat_channels(parts));
  }
  {
    std::vector<Var> parts{up1_(t.y2), e1};
    if (multiscale_) {
      parts.push_back(nn::resize_bilinear(t.y3, s.h, s.w));
      parts.push_back(nn::resize_bilinear(t.y4, s.h, s.w));
    }
    t.y1 = up_block(dec1_, site(nn::concat_channels(parts), g_full, spade1_));
  }
  out.y_prime_rgb = nn::sigmoid(head_(t.y1));
  return out;
}

GbUnet::GbUnet(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng) {
  const int w = config.gb_width;
  enc1_ = nn::make_conv(group, "enc1", 3, w, 3, 1, 1, rng);
  enc2_ = nn::make_conv(group, "enc2", w, 2 * w, 4, 2, 1, rng);
  enc3_ = nn::make_conv(group, "enc3", 2 * w, 4 * w, 4, 2, 1, rng);
  enc4_ = nn::make_conv(group, "enc4", 4 * w, 8 * w, 4, 2, 1, rng);
  dec4_ = nn::make_conv(group, "dec4", 8 * w, 4 * w, 3, 1, 1, rng);
  up3_ = nn::make_up_conv(group, "up3", 4 * w, 2 * w, rng);
  dec3_ = nn::make_conv(group, "dec3", 6 * w, 2 * w, 3, 1, 1, rng);
  up2_ = nn::make_up_conv(group, "up2", 2 * w, w, rng);
  dec2_ = nn::make_conv(group, "dec2", 3 * w, w, 3, 1, 1, rng);
  up1_ = nn::make_up_conv(group, "up1", w, w, rng);
  dec1_ = nn::make_conv(group, "dec1", 2 * w, w, 3, 1, 1, rng);
  head_ = nn::make_conv(group, "head", w, 1, 1, 1, 0, rng);
}

Var GbUnet::forward(const Var& rgb) const {
  const nn::Shape s = rgb.shape();
  if (s.c != 3) {
    throw ShapeError("gb_forward: expected a 3-channel RGB input, got " + s.str());
  }
  require_divisible_by_8(s.h, s.w, "gb_forward");

  const Var e1 = nn::leaky_relu(enc1_(rgb));
  const Var e2 = down_block(enc2_, e1);
  const Var e3 = down_block(enc3_, e2);
  const Var e4 = down_block(enc4_, e3);

  const Var y4 = up_block(dec4_, e4);
  const std::vector<Var> p3{up3_(y4), e3};
  const Var y3 = up_block(dec3_, nn::concat_channels(p3));
  const std::vector<Var> p2{up2_(y3), e2};
  const Var y2 = up_block(dec2_, nn::concat_channels(p2));
  const std::vector<Var> p1{up1_(y2), e1};
  const Var y1 = up_block(dec1_, nn::concat_channels(p1));
  return nn::sigmoid(head_(y1));
}

GrmOutput grm_forward(const ImagePlane& nir, const ColorFeaturePyramid* pyramid, const Grm& grm) {
  if (nir.space() != ColorSpace::kNir) {
    throw ShapeError("grm_forward: expected a NIR plane, got " +
                     std::string(to_string(nir.space())));
  }
  std::optional<ColorPyramidVars> levels;
  if (pyramid != nullptr) {
    levels = ColorPyramidVars{Var::constant(pyramid->full), Var::constant(pyramid->quarter),
                              Var::constant(pyramid->eighth)};
  }
  const GrmFeatures f = grm.forward(Var::constant(to_tensor(nir)), levels ? &*levels : nullptr);
  return {to_plane(f.y_prime_rgb.value(), 0, ColorSpace::kRgb), f.taps.y1.value(),
          f.taps.y2.value(), f.taps.y3.value(), f.taps.y4.value()};
}

ImagePlane gb_forward(const ImagePlane& rgb, const GbUnet& gb) {
  if (rgb.space() != ColorSpace::kRgb) {
    throw ShapeError("gb_forward: expected an RGB plane, got " +
                     std::string(to_string(rgb.space())));
  }
  return to_plane(gb.forward(Var::constant(to_tensor(rgb))).value(), 0, ColorSpace::kNir);
}

}  // namespace mcfnet
