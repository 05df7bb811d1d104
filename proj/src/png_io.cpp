// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "mcfnet/errors.hpp"

namespace mcfnet {

ImagePlane read_png(const std::filesystem::path& path, ColorSpace space) {
  if (space == ColorSpace::kHsv) {
    throw DataError("read_png: HSV is not a file format");
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read image " + path.string() + ": " + image.message);
  }
  const int channels = channels_of(space);
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DataError("cannot decode image " + path.string() + ": " + msg);
  }
  const int h = static_cast<int>(image.height);
  const int w = static_cast<int>(image.width);
  ImagePlane out(h, w, space);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        out.at(y, x, c) =
            buffer[(static_cast<std::size_t>(y) * w + x) * channels + c] / 255.0;
      }
    }
  }
  return out;
}

void write_png(const std::filesystem::path& path, const ImagePlane& img) {
  if (img.space() == ColorSpace::kHsv) {
    throw DataError("write_png: convert HSV planes to RGB before writing " + path.string());
  }
  const int channels = img.channels();
  std::vector<png_byte> buffer(static_cast<std::size_t>(img.height()) * img.width() * channels);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < channels; ++c) {
        const double v = std::clamp(img.at(y, x, c), 0.0, 1.0);
        buffer[(static_cast<std::size_t>(y) * img.width() + x) * channels + c] =
            static_cast<png_byte>(std::lround(v * 255.0));
      }
    }
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw DataError("cannot write image " + path.string() + ": " + image.message);
  }
}

}  // namespace mcfnet
