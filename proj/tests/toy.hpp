// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

// A tiny stand-in for the full system (96 parameters) used for
// finite-difference checks of every loss term.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mcfnet/losses.hpp"
#include "mcfnet/nn/layers.hpp"
#include "mcfnet/nn/ops.hpp"
#include "support.hpp"

namespace mcfnet::testing {

struct ToyModel {
  nn::ParamGroup group{"toy"};
  nn::Conv2d colorize;  // 1 -> 3, 3x3
  nn::Conv2d restore;   // 3 -> 1, 3x3
  nn::Conv2d judge_rgb;  // 3 -> 1, 3x3 stride 2
  nn::Conv2d judge_nir;  // 1 -> 1, 3x3 stride 2
  nn::Tensor nir;        // 1x1x6x6
  nn::Tensor rgb;        // 1x3x6x6

  explicit ToyModel(std::uint64_t seed) {
    nn::Rng rng(seed);
    colorize = nn::make_conv(group, "colorize", 1, 3, 3, 1, 1, rng);
    restore = nn::make_conv(group, "restore", 3, 1, 3, 1, 1, rng);
    judge_rgb = nn::make_conv(group, "judge_rgb", 3, 1, 3, 2, 1, rng);
    judge_nir = nn::make_conv(group, "judge_nir", 1, 1, 3, 2, 1, rng);
    Gen gen(seed + 1);
    for (const auto& p : group.params()) {
      nn::Var v = p.var;
      for (double& x : v.mutable_value().values()) x = gen.normal(0.5);
    }
    nir = gen.tensor({1, 1, 6, 6}, 0, 1);
    rgb = gen.tensor({1, 3, 6, 6}, 0, 1);
  }

  std::vector<nn::Var> params() const {
    std::vector<nn::Var> out;
    for (const auto& p : group.params()) out.push_back(p.var);
    return out;
  }

  nn::Var fake_rgb(const nn::Var& x) const { return nn::sigmoid(colorize(x)); }
  nn::Var fake_nir(const nn::Var& x) const { return nn::sigmoid(restore(x)); }
  nn::Var d_rgb(const nn::Var& x) const { return nn::sigmoid(judge_rgb(x)); }
  nn::Var d_nir(const nn::Var& x) const { return nn::sigmoid(judge_nir(x)); }

  /// Each loss term as a closure over the toy graph.
  std::vector<std::pair<std::string, std::function<nn::Var()>>> terms() const {
    const nn::Var a = nn::Var::constant(nir);
    const nn::Var b = nn::Var::constant(rgb);
    return {
        {"gan", [=, this] { return gan_loss(d_rgb(b), d_rgb(fake_rgb(a))); }},
        {"generator_gan", [=, this] { return generator_gan_loss(d_nir(fake_nir(b))); }},
        {"pair", [=, this] { return pair_loss(fake_rgb(a), b, fake_nir(b), a); }},
        {"cycle",
         [=, this] {
           return cycle_loss(fake_nir(fake_rgb(a)), a, fake_rgb(fake_nir(b)), b);
         }},
        {"edge", [=, this] { return edge_loss(fake_rgb(a), b, fake_nir(b), a); }},
        {"total",
         [=, this] {
           const nn::Var ya = fake_rgb(a), yb = fake_nir(b);
           LossTerms t;
           t.gan = nn::add(generator_gan_loss(d_rgb(ya)), generator_gan_loss(d_nir(yb)));
           t.pair = pair_loss(ya, b, yb, a);
           t.cyc = cycle_loss(fake_nir(ya), a, fake_rgb(yb), b);
           t.edge = edge_loss(ya, b, yb, a);
           return weighted_total(t, LossWeights{});
         }},
    };
  }
};

}  // namespace mcfnet::testing
