// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mcfnet/nn/autograd.hpp"

namespace mcfnet {

/// Probabilities are clamped to [eps, 1 - eps] before every log.
inline constexpr double kLogClampEps = 1e-7;

struct LossWeights {
  double lambda_cyc = 10.0;
  double lambda_pair = 10.0;
  double lambda_edge = 5.0;

  /// Throws ConfigError unless every weight is finite and non-negative.
  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct LossBreakdown {
  double gan = 0.0;
  double pair = 0.0;
  double cyc = 0.0;
  double edge = 0.0;
  double total = 0.0;
};

/// Adversarial value mean(log D(real)) + mean(log(1 - D(fake))). The
/// discriminator ascends it. Throws NumericError on non-finite input.
nn::Var gan_loss(const nn::Var& d_real, const nn::Var& d_fake);

/// Non-saturating generator objective -mean(log D(fake)).
nn::Var generator_gan_loss(const nn::Var& d_fake);

/// Mean absolute difference.
nn::Var l1_loss(const nn::Var& a, const nn::Var& b);

/// mean|pred_rgb - gt_rgb| + mean|pred_nir - gt_nir|
nn::Var pair_loss(const nn::Var& pred_rgb, const nn::Var& gt_rgb, const nn::Var& pred_nir,
                  const nn::Var& gt_nir);

/// mean|recon_nir - orig_nir| + mean|recon_rgb - orig_rgb|
nn::Var cycle_loss(const nn::Var& recon_nir, const nn::Var& orig_nir, const nn::Var& recon_rgb,
                   const nn::Var& orig_rgb);

/// Pair loss over Laplacian edge maps of both legs.
nn::Var edge_loss(const nn::Var& pred_rgb, const nn::Var& gt_rgb, const nn::Var& pred_nir,
                  const nn::Var& gt_nir);

/// Supervision of the HSV branch: mean|y_hsv - x_hsv|, weighted like the
/// pair term.
nn::Var hsv_loss(const nn::Var& y_hsv, const nn::Var& target_hsv);

/// Graph form of the weighted sum. Undefined terms count as zero.
struct LossTerms {
  nn::Var gan;
  nn::Var pair;
  nn::Var cyc;
  nn::Var edge;
};

nn::Var weighted_total(const LossTerms& terms, const LossWeights& w);

/// total = gan + lambda_cyc*cyc + lambda_pair*pair + lambda_edge*edge. The
/// `total` field of `parts` is ignored. Throws NumericError on non-finite
/// parts.
LossBreakdown total_loss(const LossBreakdown& parts, const LossWeights& w);

/// Breakdown of evaluated graph terms.
LossBreakdown evaluate(const LossTerms& terms, const LossWeights& w);

}  // namespace mcfnet
