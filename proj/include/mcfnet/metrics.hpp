// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcfnet/image.hpp"

namespace mcfnet {

/// PSNR of identical images.
inline constexpr double kPsnrCap = 100.0;
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

/// 10*log10(1/MSE) over every channel, capped at kPsnrCap. Inputs in [0,1].
double psnr(const ImagePlane& pred, const ImagePlane& gt);

/// Gaussian-windowed SSIM on luminance (mean of channels), averaged over
/// every fully contained window. Throws ShapeError below 11x11.
double ssim(const ImagePlane& pred, const ImagePlane& gt);

/// Mean per-pixel angle in degrees between RGB vectors. Pixels where either
/// vector is zero contribute 0.
double angular_error(const ImagePlane& pred, const ImagePlane& gt);

/// External perceptual distance (for example a learned feature metric).
using PerceptualProvider = std::function<double(const ImagePlane& pred, const ImagePlane& gt)>;

struct ImageMetrics {
  std::string id;
  double psnr = 0.0;
  double ssim = 0.0;
  double ae = 0.0;
  std::optional<double> perceptual;
};

struct MetricsReport {
  std::vector<ImageMetrics> per_image;
  ImageMetrics aggregate;  // id "mean"
};

/// Arithmetic means of the per-image entries.
ImageMetrics aggregate(const std::vector<ImageMetrics>& rows);

/// Scores every `<stem>.png` of `pred_dir` against the same stem in
/// `gt_dir`, both read as RGB. Throws DataError listing unmatched stems.
MetricsReport evaluate(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                       const PerceptualProvider& perceptual = {});

/// Writes `report.csv` (id,psnr,ssim,ae,perceptual, plus a final "mean"
/// row) and `report.json` into `out_dir`.
void write_report(const MetricsReport& report, const std::filesystem::path& out_dir);

}  // namespace mcfnet
