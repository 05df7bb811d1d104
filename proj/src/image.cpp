// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/image.hpp"

#include <cmath>
#include <string>

#include "mcfnet/errors.hpp"

namespace mcfnet {

std::string_view to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::kNir:
      return "NIR";
    case ColorSpace::kRgb:
      return "RGB";
    case ColorSpace::kHsv:
      return "HSV";
  }
  return "?";
}

int channels_of(ColorSpace space) { return space == ColorSpace::kNir ? 1 : 3; }

ImagePlane::ImagePlane(int height, int width, ColorSpace space, double fill)
    : height_(height), width_(width), space_(space) {
  if (height < 0 || width < 0) {
    throw ShapeError("ImagePlane: negative dimensions");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels_of(space), fill);
}

ImagePlane::ImagePlane(int height, int width, ColorSpace space, std::vector<double> data)
    : height_(height), width_(width), space_(space), data_(std::move(data)) {
  if (height < 0 || width < 0) {
    throw ShapeError("ImagePlane: negative dimensions");
  }
  const std::size_t expected = static_cast<std::size_t>(height) * width * channels_of(space);
  if (data_.size() != expected) {
    throw ShapeError("ImagePlane: " + std::string(to_string(space)) + " plane of " +
                     std::to_string(height) + "x" + std::to_string(width) + " needs " +
                     std::to_string(expected) + " values, got " + std::to_string(data_.size()));
  }
}

std::span<const double> ImagePlane::channel(int c) const {
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  return std::span<const double>(data_).subspan(c * plane, plane);
}

std::span<double> ImagePlane::channel(int c) {
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  return std::span<double>(data_).subspan(c * plane, plane);
}

void ImagePlane::require_unit_range(std::string_view what) const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw RangeError(std::string(what) + ": value " + std::to_string(v) + " at flat index " +
                       std::to_string(i) + " outside [0,1]");
    }
  }
}

TextureMap::TextureMap(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
}

}  // namespace mcfnet
