// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/texture.hpp"

#include <algorithm>
#include <string>

#include "mcfnet/errors.hpp"

namespace mcfnet {
namespace detail {

void laplacian_plane(std::span<const double> src, int height, int width, std::span<double> dst) {
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = std::clamp(y + dy, 0, height - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          const double k = kLaplacianKernel[(dy + 1) * 3 + (dx + 1)];
          if (k == 0.0) continue;
          const int sx = std::clamp(x + dx, 0, width - 1);
          acc += k * src[static_cast<std::size_t>(sy) * width + sx];
        }
      }
      dst[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
}

void laplacian_plane_adjoint(std::span<const double> grad_out, int height, int width,
                             std::span<double> grad_in) {
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double g = grad_out[static_cast<std::size_t>(y) * width + x];
      if (g == 0.0) continue;
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = std::clamp(y + dy, 0, height - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          const double k = kLaplacianKernel[(dy + 1) * 3 + (dx + 1)];
          if (k == 0.0) continue;
          const int sx = std::clamp(x + dx, 0, width - 1);
          grad_in[static_cast<std::size_t>(sy) * width + sx] += k * g;
        }
      }
    }
  }
}

}  // namespace detail

TextureMap laplacian_map(const ImagePlane& img) {
  if (img.height() < 3 || img.width() < 3) {
    throw ShapeError("laplacian_map: image " + std::to_string(img.height()) + "x" +
                     std::to_string(img.width()) + " is smaller than 3x3");
  }
  TextureMap out(img.height(), img.width(), img.channels());
  const std::size_t plane = static_cast<std::size_t>(img.height()) * img.width();
  for (int c = 0; c < img.channels(); ++c) {
    detail::laplacian_plane(img.channel(c), img.height(), img.width(),
                            out.values().subspan(c * plane, plane));
  }
  return out;
}

TextureMap edge_map(const ImagePlane& img) { return laplacian_map(img); }

}  // namespace mcfnet
