// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "mcfnet/image.hpp"
#include "mcfnet/nn/tensor.hpp"

namespace mcfnet {

/// 1xCxHxW tensor holding a copy of the plane.
nn::Tensor to_tensor(const ImagePlane& img);

/// Nx C x H x W batch from planes of identical shape.
nn::Tensor to_batch(std::span<const ImagePlane> imgs);

/// Sample `n` of a batch as a plane tagged `space`; channel count must match.
ImagePlane to_plane(const nn::Tensor& t, int n, ColorSpace space);

/// Sample `n` as a signed texture map.
TextureMap to_texture(const nn::Tensor& t, int n);

}  // namespace mcfnet
