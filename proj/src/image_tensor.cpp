// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/image_tensor.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "mcfnet/errors.hpp"

namespace mcfnet {

nn::Tensor to_tensor(const ImagePlane& img) {
  const auto v = img.values();
  return nn::Tensor({1, img.channels(), img.height(), img.width()},
                    std::vector<double>(v.begin(), v.end()));
}

nn::Tensor to_batch(std::span<const ImagePlane> imgs) {
  std::vector<nn::Tensor> samples;
  samples.reserve(imgs.size());
  for (const auto& img : imgs) samples.push_back(to_tensor(img));
  return nn::stack(samples);
}

ImagePlane to_plane(const nn::Tensor& t, int n, ColorSpace space) {
  const nn::Shape& s = t.shape();
  if (n < 0 || n >= s.n || s.c != channels_of(space)) {
    throw ShapeError("to_plane: cannot view sample " + std::to_string(n) + " of " + s.str() +
                     " as " + std::string(to_string(space)));
  }
  const std::size_t count = static_cast<std::size_t>(s.c) * s.plane();
  const double* src = t.data() + n * count;
  return ImagePlane(s.h, s.w, space, std::vector<double>(src, src + count));
}

TextureMap to_texture(const nn::Tensor& t, int n) {
  const nn::Shape& s = t.shape();
  if (n < 0 || n >= s.n) {
    throw ShapeError("to_texture: sample " + std::to_string(n) + " out of " + s.str());
  }
  TextureMap out(s.h, s.w, s.c);
  const std::size_t count = static_cast<std::size_t>(s.c) * s.plane();
  std::copy_n(t.data() + n * count, count, out.values().begin());
  return out;
}

}  // namespace mcfnet
