// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

// Direct-definition image metrics, written loop by loop without sharing any
// code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mcfnet/image.hpp"

namespace mcfnet::testing {

inline double brute_psnr(const ImagePlane& a, const ImagePlane& b) {
  double se = 0.0;
  int count = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      for (int c = 0; c < a.channels(); ++c) {
        const double d = a.at(y, x, c) - b.at(y, x, c);
        se += d * d;
        ++count;
      }
  if (se == 0.0) return 100.0;
  return std::min(100.0, -10.0 * std::log10(se / count));
}

inline double brute_ae(const ImagePlane& a, const ImagePlane& b) {
  double total = 0.0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int c = 0; c < 3; ++c) {
        dot += a.at(y, x, c) * b.at(y, x, c);
        na += a.at(y, x, c) * a.at(y, x, c);
        nb += b.at(y, x, c) * b.at(y, x, c);
      }
      if (na == 0.0 || nb == 0.0) continue;
      const double cosine = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
      total += std::acos(cosine) * 180.0 / std::numbers::pi;
    }
  return total / (a.height() * a.width());
}

/// Mean SSIM over every 11x11 window fully inside the image, with a
/// normalised 2-D Gaussian of sigma 1.5, on the channel-mean luminance.
inline double brute_ssim(const ImagePlane& a, const ImagePlane& b) {
  const int h = a.height(), w = a.width(), k = 11;
  auto lum = [](const ImagePlane& img, int y, int x) {
    double s = 0.0;
    for (int c = 0; c < img.channels(); ++c) s += img.at(y, x, c);
    return s / img.channels();
  };
  std::vector<double> win(k * k);
  double norm = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double di = i - 5, dj = j - 5;
      win[i * k + j] = std::exp(-(di * di + dj * dj) / (2 * 1.5 * 1.5));
      norm += win[i * k + j];
    }
  for (double& v : win) v /= norm;
  const double c1 = 1e-4, c2 = 9e-4;
  double total = 0.0;
  int windows = 0;
  for (int y = 0; y + k <= h; ++y)
    for (int x = 0; x + k <= w; ++x) {
      double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          const double g = win[i * k + j];
          const double va = lum(a, y + i, x + j), vb = lum(b, y + i, x + j);
          ma += g * va;
          mb += g * vb;
          maa += g * va * va;
          mbb += g * vb * vb;
          mab += g * va * vb;
        }
      const double sa = maa - ma * ma, sb = mbb - mb * mb, sab = mab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * sab + c2)) /
               ((ma * ma + mb * mb + c1) * (sa + sb + c2));
      ++windows;
    }
  return total / windows;
}

}  // namespace mcfnet::testing
