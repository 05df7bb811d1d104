// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mcfnet {

enum class ColorSpace { kNir, kRgb, kHsv };

std::string_view to_string(ColorSpace space);

/// Number of channels a plane in `space` carries (1 for NIR, 3 otherwise).
int channels_of(ColorSpace space);

/// A normalized raster. Storage is planar: channel-major, then row, then
/// column, which matches the layout of one sample in an NCHW tensor.
///
/// Hue in an HSV plane is a fraction of the full circle.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int height, int width, ColorSpace space, double fill = 0.0);
  ImagePlane(int height, int width, ColorSpace space, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_of(space_); }
  ColorSpace space() const { return space_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  /// View of one channel plane (height*width values).
  std::span<const double> channel(int c) const;
  std::span<double> channel(int c);

  /// Throws RangeError naming `what` if any value lies outside [0,1] or is
  /// not finite.
  void require_unit_range(std::string_view what) const;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  ColorSpace space_ = ColorSpace::kRgb;
  std::vector<double> data_;
};

/// Signed per-channel filter responses; same layout as ImagePlane.
class TextureMap {
 public:
  TextureMap() = default;
  TextureMap(int height, int width, int channels);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

}  // namespace mcfnet
