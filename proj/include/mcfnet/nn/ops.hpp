// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "mcfnet/nn/autograd.hpp"

namespace mcfnet::nn {

// Differentiable operators over NCHW Vars. Every op validates shapes and
// throws ShapeError on mismatch.

/// weight: {out, in, k, k}; bias: {1, out, 1, 1} or undefined. Zero padding.
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);

/// weight: {in, out, k, k}; output extent (in-1)*stride - 2*pad + k.
Var conv_transpose2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);

/// Parameter-free per-sample, per-channel standardisation over spatial
/// positions: (x - mean) / sqrt(var + eps).
Var instance_norm(const Var& x, double eps = 1e-5);

Var relu(const Var& x);
Var leaky_relu(const Var& x, double slope = 0.2);
Var sigmoid(const Var& x);
Var abs(const Var& x);

/// log(clamp(x, eps, 1 - eps)); the gradient is zero where the clamp binds.
Var log_clamped(const Var& x, double eps);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double s);
Var add_scalar(const Var& x, double s);

/// Mean over every element, as a {1,1,1,1} Var.
Var mean(const Var& x);

/// Concatenation along the channel axis.
Var concat_channels(std::span<const Var> parts);

/// Bilinear resampling with half-pixel centres (edge samples clamp).
Var resize_bilinear(const Var& x, int out_h, int out_w);

/// Fixed Laplacian stencil per channel with replicate padding.
Var laplacian(const Var& x);

Var zeros(Shape shape);

}  // namespace mcfnet::nn
