// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "mcfnet/image.hpp"

namespace mcfnet {

using Rgb = std::array<double, 3>;
using Hsv = std::array<double, 3>;

// Hexcone conversions. Hue is a fraction of the circle in [0,1); achromatic
// pixels get hue 0 and saturation 0. Out-of-range input throws RangeError.
Hsv rgb_to_hsv(const Rgb& rgb);
Rgb hsv_to_rgb(const Hsv& hsv);

ImagePlane rgb_to_hsv(const ImagePlane& img);
ImagePlane hsv_to_rgb(const ImagePlane& img);

/// Copies a single NIR channel into three identical RGB channels.
ImagePlane replicate_nir(const ImagePlane& img);

}  // namespace mcfnet
