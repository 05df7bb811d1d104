// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>

#include "mcfnet/image.hpp"

namespace mcfnet {

/// 4-neighbour Laplacian stencil, row-major.
inline constexpr std::array<double, 9> kLaplacianKernel = {
    0.0, 1.0, 0.0,  //
    1.0, -4.0, 1.0,  //
    0.0, 1.0, 0.0,
};

/// Texture map of an image: per-channel Laplacian with replicate padding.
/// Output is not clipped. Throws ShapeError below 3x3.
TextureMap laplacian_map(const ImagePlane& img);

/// Edge features used by the edge loss. Same operator as laplacian_map.
TextureMap edge_map(const ImagePlane& img);

namespace detail {

/// Applies kLaplacianKernel to one height*width plane with replicate padding.
void laplacian_plane(std::span<const double> src, int height, int width, std::span<double> dst);

/// Adjoint of laplacian_plane: accumulates the input gradient for `grad_out`.
void laplacian_plane_adjoint(std::span<const double> grad_out, int height, int width,
                             std::span<double> grad_in);

}  // namespace detail
}  // namespace mcfnet
