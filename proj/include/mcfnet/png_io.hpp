// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "mcfnet/image.hpp"

namespace mcfnet {

/// Decodes an 8-bit PNG into [0,1] (value / 255). `space` selects grayscale
/// (NIR) or RGB decoding; libpng converts other layouts. Throws DataError.
ImagePlane read_png(const std::filesystem::path& path, ColorSpace space);

/// Encodes a NIR or RGB plane as 8-bit PNG, rounding value * 255. HSV planes
/// are rejected; convert them first. Throws DataError on I/O failure.
void write_png(const std::filesystem::path& path, const ImagePlane& img);

}  // namespace mcfnet
