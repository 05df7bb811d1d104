// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/blocks.hpp"

#include <array>
#include <string>

#include "mcfnet/errors.hpp"
#include "mcfnet/image_tensor.hpp"
#include "mcfnet/nn/ops.hpp"

namespace mcfnet {

using nn::Var;

void ModelConfig::validate() const {
  const std::array<std::pair<const char*, int>, 7> widths{{{"grm_width", grm_width},
                                                           {"cfem_width", cfem_width},
                                                           {"color_features", color_features},
                                                           {"spade_hidden", spade_hidden},
                                                           {"fusion_width", fusion_width},
                                                           {"gb_width", gb_width},
                                                           {"disc_width", disc_width}}};
  for (const auto& [name, value] : widths) {
    if (value < 1) {
      throw ConfigError(std::string("model.") + name + " must be positive, got " +
                        std::to_string(value));
    }
  }
}

SpadeParams make_spade(nn::ParamGroup& group, const std::string& name, int guidance_channels,
                       int feature_channels, int hidden, nn::Rng& rng) {
  SpadeParams p;
  p.shared = nn::make_conv(group, name + ".shared", guidance_channels, hidden, 3, 1, 1, rng);
  p.gamma = nn::make_conv(group, name + ".gamma", hidden, feature_channels, 3, 1, 1, rng);
  p.beta = nn::make_conv(group, name + ".beta", hidden, feature_channels, 3, 1, 1, rng);
  return p;
}

Var spade_modulate(const Var& features, const Var& guidance, const SpadeParams& params) {
  const nn::Shape fs = features.shape();
  const nn::Shape gs = guidance.shape();
  if (gs.n != fs.n) {
    throw ShapeError("spade_modulate: guidance batch " + gs.str() + " vs features " + fs.str());
  }
  const Var g = nn::resize_bilinear(guidance, fs.h, fs.w);
  const Var act = nn::relu(params.shared(g));
  const Var gamma = params.gamma(act);
  const Var beta = params.beta(act);
  if (gamma.shape().c != fs.c || beta.shape().c != fs.c) {
    throw ShapeError("spade_modulate: heads emit " + std::to_string(gamma.shape().c) + "/" +
                     std::to_string(beta.shape().c) + " channels for " + std::to_string(fs.c) +
                     "-channel features");
  }
  const Var normalized = nn::instance_norm(features, kSpadeEps);
  return nn::add(nn::mul(normalized, nn::add_scalar(gamma, 1.0)), beta);
}

FusionModule::FusionModule(nn::ParamGroup& group, const ModelConfig& config, nn::Rng& rng) {
  const int w = config.fusion_width;
  spade1_ = make_spade(group, "spade1", 3, 4, config.spade_hidden, rng);
  conv1_ = nn::make_conv(group, "conv1", 4, w, 3, 1, 1, rng);
  spade2_ = make_spade(group, "spade2", 3, w, config.spade_hidden, rng);
  conv2_ = nn::make_conv(group, "conv2", w, w, 3, 1, 1, rng);
  head_ = nn::make_conv(group, "head", w, 3, 1, 1, 0, rng);
}

Var FusionModule::forward(const Var& y_prime, const Var& y_tex, const Var& y_hsv) const {
  const nn::Shape ps = y_prime.shape();
  const nn::Shape ts = y_tex.shape();
  const nn::Shape hs = y_hsv.shape();
  if (ps.c != 3 || ts.c != 1 || hs.c != 3) {
    throw ShapeError("fuse_branches: expected 3/1/3 channels, got " + ps.str() + " " + ts.str() +
                     " " + hs.str());
  }
  if (ps.n != ts.n || ps.n != hs.n || ps.h != ts.h || ps.w != ts.w || ps.h != hs.h ||
      ps.w != hs.w) {
    throw ShapeError("fuse_branches: spatial mismatch " + ps.str() + " " + ts.str() + " " +
                     hs.str());
  }
  const std::array<Var, 2> parts{y_prime, y_tex};
  Var h = nn::concat_channels(parts);
  h = nn::relu(conv1_(spade_modulate(h, y_hsv, spade1_)));
  h = nn::relu(conv2_(spade_modulate(h, y_hsv, spade2_)));
  return nn::sigmoid(head_(h));
}

PatchDiscriminator::PatchDiscriminator(nn::ParamGroup& group, int in_channels, int width,
                                       nn::Rng& rng)
    : in_channels_(in_channels) {
  c1_ = nn::make_conv(group, "c1", in_channels, width, 4, 2, 1, rng);
  c2_ = nn::make_conv(group, "c2", width, 2 * width, 4, 2, 1, rng);
  c3_ = nn::make_conv(group, "c3", 2 * width, 4 * width, 4, 2, 1, rng);
  c4_ = nn::make_conv(group, "c4", 4 * width, 8 * width, 4, 1, 1, rng);
  c5_ = nn::make_conv(group, "c5", 8 * width, 1, 4, 1, 1, rng);
}

Var PatchDiscriminator::forward(const Var& img) const {
  const nn::Shape s = img.shape();
  if (s.c != in_channels_) {
    throw ShapeError("discriminate: expected " + std::to_string(in_channels_) +
                     "-channel input, got " + s.str());
  }
  if (s.h < 24 || s.w < 24) {
    throw ShapeError("discriminate: input " + s.str() + " is smaller than 24x24");
  }
  Var h = nn::leaky_relu(c1_(img));
  h = nn::leaky_relu(nn::instance_norm(c2_(h)));
  h = nn::leaky_relu(nn::instance_norm(c3_(h)));
  h = nn::leaky_relu(nn::instance_norm(c4_(h)));
  return nn::sigmoid(c5_(h));
}

ImagePlane fuse_branches(const ImagePlane& y_prime_rgb, const ImagePlane& y_hsv,
                         const TextureMap& y_tex, const FusionModule& fusion) {
  if (y_prime_rgb.space() != ColorSpace::kRgb || y_hsv.space() != ColorSpace::kHsv) {
    throw ShapeError("fuse_branches: expected RGB and HSV planes");
  }
  nn::Tensor tex({1, y_tex.channels(), y_tex.height(), y_tex.width()},
                 std::vector<double>(y_tex.values().begin(), y_tex.values().end()));
  const Var out = fusion.forward(Var::constant(to_tensor(y_prime_rgb)),
                                 Var::constant(std::move(tex)), Var::constant(to_tensor(y_hsv)));
  return to_plane(out.value(), 0, ColorSpace::kRgb);
}

PatchLogits discriminate(const ImagePlane& img, const PatchDiscriminator& disc) {
  return {disc.forward(Var::constant(to_tensor(img))).value()};
}

}  // namespace mcfnet
