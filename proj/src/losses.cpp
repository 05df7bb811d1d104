// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/losses.hpp"

#include <cmath>
#include <string>

#include "mcfnet/errors.hpp"
#include "mcfnet/nn/ops.hpp"

namespace mcfnet {

using nn::Var;

namespace {

void require_finite(const Var& v, const char* what) {
  for (double x : v.value().values()) {
    if (!std::isfinite(x)) {
      throw NumericError(std::string(what) + ": non-finite input");
    }
  }
}

void require_same_shape(const Var& a, const Var& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape " + a.shape().str() + " vs " + b.shape().str());
  }
}

double value_or_zero(const Var& v) { return v.defined() ? v.value().item() : 0.0; }

}  // namespace

void LossWeights::validate() const {
  for (double w : {lambda_cyc, lambda_pair, lambda_edge}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError("loss weights must be finite and non-negative, got " + std::to_string(w));
    }
  }
}

Var gan_loss(const Var& d_real, const Var& d_fake) {
  require_finite(d_real, "gan_loss");
  require_finite(d_fake, "gan_loss");
  const Var real_term = nn::mean(nn::log_clamped(d_real, kLogClampEps));
  const Var fake_term =
      nn::mean(nn::log_clamped(nn::add_scalar(nn::scale(d_fake, -1.0), 1.0), kLogClampEps));
  return nn::add(real_term, fake_term);
}

Var generator_gan_loss(const Var& d_fake) {
  require_finite(d_fake, "generator_gan_loss");
  return nn::scale(nn::mean(nn::log_clamped(d_fake, kLogClampEps)), -1.0);
}

Var l1_loss(const Var& a, const Var& b) {
  require_same_shape(a, b, "l1_loss");
  return nn::mean(nn::abs(nn::sub(a, b)));
}

Var pair_loss(const Var& pred_rgb, const Var& gt_rgb, const Var& pred_nir, const Var& gt_nir) {
  require_same_shape(pred_rgb, gt_rgb, "pair_loss");
  require_same_shape(pred_nir, gt_nir, "pair_loss");
  return nn::add(l1_loss(pred_rgb, gt_rgb), l1_loss(pred_nir, gt_nir));
}

Var cycle_loss(const Var& recon_nir, const Var& orig_nir, const Var& recon_rgb,
               const Var& orig_rgb) {
  require_same_shape(recon_nir, orig_nir, "cycle_loss");
  require_same_shape(recon_rgb, orig_rgb, "cycle_loss");
  return nn::add(l1_loss(recon_nir, orig_nir), l1_loss(recon_rgb, orig_rgb));
}

Var edge_loss(const Var& pred_rgb, const Var& gt_rgb, const Var& pred_nir, const Var& gt_nir) {
  require_same_shape(pred_rgb, gt_rgb, "edge_loss");
  require_same_shape(pred_nir, gt_nir, "edge_loss");
  return nn::add(l1_loss(nn::laplacian(pred_rgb), nn::laplacian(gt_rgb)),
                 l1_loss(nn::laplacian(pred_nir), nn::laplacian(gt_nir)));
}

Var hsv_loss(const Var& y_hsv, const Var& target_hsv) {
  require_same_shape(y_hsv, target_hsv, "hsv_loss");
  return l1_loss(y_hsv, target_hsv);
}

Var weighted_total(const LossTerms& terms, const LossWeights& w) {
  Var total;
  auto accumulate = [&total](const Var& term, double weight) {
    if (!term.defined()) return;
    const Var scaled = weight == 1.0 ? term : nn::scale(term, weight);
    total = total.defined() ? nn::add(total, scaled) : scaled;
  };
  accumulate(terms.gan, 1.0);
  accumulate(terms.cyc, w.lambda_cyc);
  accumulate(terms.pair, w.lambda_pair);
  accumulate(terms.edge, w.lambda_edge);
  if (!total.defined()) {
    total = nn::zeros({1, 1, 1, 1});
  }
  return total;
}

LossBreakdown total_loss(const LossBreakdown& parts, const LossWeights& w) {
  for (double v : {parts.gan, parts.pair, parts.cyc, parts.edge}) {
    if (!std::isfinite(v)) {
      throw NumericError("total_loss: non-finite component " + std::to_string(v));
    }
  }
  LossBreakdown out = parts;
  out.total = parts.gan + w.lambda_cyc * parts.cyc + w.lambda_pair * parts.pair +
              w.lambda_edge * parts.edge;
  return out;
}

LossBreakdown evaluate(const LossTerms& terms, const LossWeights& w) {
  LossBreakdown parts;
  parts.gan = value_or_zero(terms.gan);
  parts.pair = value_or_zero(terms.pair);
  parts.cyc = value_or_zero(terms.cyc);
  parts.edge = value_or_zero(terms.edge);
  return total_loss(parts, w);
}

}  // namespace mcfnet
