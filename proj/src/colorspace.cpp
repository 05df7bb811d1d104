// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcfnet/errors.hpp"

namespace mcfnet {
namespace {

void require_unit(const std::array<double, 3>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw RangeError(std::string(what) + ": component " + std::to_string(x) +
                       " outside [0,1]");
    }
  }
}

}  // namespace

Hsv rgb_to_hsv(const Rgb& rgb) {
  require_unit(rgb, "rgb_to_hsv");
  const auto [r, g, b] = rgb;
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double delta = max - min;

  Hsv out{0.0, 0.0, max};
  if (delta <= 0.0) {
    return out;
  }
  out[1] = delta / max;

  double sector;
  if (max == r) {
    sector = (g - b) / delta;
    if (sector < 0.0) sector += 6.0;
  } else if (max == g) {
    sector = (b - r) / delta + 2.0;
  } else {
    sector = (r - g) / delta + 4.0;
  }
  double hue = sector / 6.0;
  if (hue >= 1.0) hue -= 1.0;
  out[0] = hue;
  return out;
}

Rgb hsv_to_rgb(const Hsv& hsv) {
  require_unit(hsv, "hsv_to_rgb");
  const auto [h, s, v] = hsv;
  if (s <= 0.0) {
    return {v, v, v};
  }
  // h == 1 is the same angle as h == 0.
  const double scaled = (h >= 1.0 ? 0.0 : h) * 6.0;
  const int sector = std::min(static_cast<int>(std::floor(scaled)), 5);
  const double f = scaled - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0:
      return {v, t, p};
    case 1:
      return {q, v, p};
    case 2:
      return {p, v, t};
    case 3:
      return {p, q, v};
    case 4:
      return {t, p, v};
    default:
      return {v, p, q};
  }
}

namespace {

template <typename Fn>
ImagePlane convert_pixels(const ImagePlane& img, ColorSpace from, ColorSpace to, Fn&& fn,
                          const char* what) {
  if (img.space() != from || img.channels() != 3) {
    throw ShapeError(std::string(what) + ": expected a 3-channel " +
                     std::string(to_string(from)) + " plane, got " +
                     std::string(to_string(img.space())));
  }
  ImagePlane out(img.height(), img.width(), to);
  const auto c0 = img.channel(0);
  const auto c1 = img.channel(1);
  const auto c2 = img.channel(2);
  auto o0 = out.channel(0);
  auto o1 = out.channel(1);
  auto o2 = out.channel(2);
  for (std::size_t i = 0; i < c0.size(); ++i) {
    const auto px = fn({c0[i], c1[i], c2[i]});
    o0[i] = px[0];
    o1[i] = px[1];
    o2[i] = px[2];
  }
  return out;
}

}  // namespace

ImagePlane rgb_to_hsv(const ImagePlane& img) {
  return convert_pixels(
      img, ColorSpace::kRgb, ColorSpace::kHsv,
      [](const Rgb& px) { return rgb_to_hsv(px); }, "rgb_to_hsv");
}

ImagePlane hsv_to_rgb(const ImagePlane& img) {
  return convert_pixels(
      img, ColorSpace::kHsv, ColorSpace::kRgb,
      [](const Hsv& px) { return hsv_to_rgb(px); }, "hsv_to_rgb");
}

ImagePlane replicate_nir(const ImagePlane& img) {
  if (img.channels() != 1) {
    throw ShapeError("replicate_nir: expected a single-channel plane, got " +
                     std::to_string(img.channels()) + " channels");
  }
  ImagePlane out(img.height(), img.width(), ColorSpace::kRgb);
  const auto src = img.channel(0);
  for (int c = 0; c < 3; ++c) {
    std::ranges::copy(src, out.channel(c).begin());
  }
  return out;
}

}  // namespace mcfnet
