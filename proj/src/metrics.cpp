// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include <nlohmann/json.hpp>

#include "mcfnet/data.hpp"
#include "mcfnet/errors.hpp"
#include "mcfnet/png_io.hpp"

namespace mcfnet {

namespace {

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + "x" + std::to_string(a.channels()) + " vs " +
                     std::to_string(b.height()) + "x" + std::to_string(b.width()) + "x" +
                     std::to_string(b.channels()));
  }
}

std::vector<double> luminance(const ImagePlane& img) {
  const std::size_t n = static_cast<std::size_t>(img.height()) * img.width();
  std::vector<double> out(n, 0.0);
  for (int c = 0; c < img.channels(); ++c) {
    const auto ch = img.channel(c);
    for (std::size_t i = 0; i < n; ++i) out[i] += ch[i];
  }
  for (double& v : out) v /= img.channels();
  return out;
}

std::array<double, kSsimWindow> gaussian_1d() {
  std::array<double, kSsimWindow> g{};
  double sum = 0.0;
  const int r = kSsimWindow / 2;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - r;
    g[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Valid-mode separable Gaussian filter.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::array<double, kSsimWindow>& g) {
  const int oh = h - kSsimWindow + 1;
  const int ow = w - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += g[k] * src[static_cast<std::size_t>(y) * w + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += g[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(const ImagePlane& pred, const ImagePlane& gt) {
  require_same_shape(pred, gt, "psnr");
  const auto a = pred.values();
  const auto b = gt.values();
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.size());
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImagePlane& pred, const ImagePlane& gt) {
  require_same_shape(pred, gt, "ssim");
  const int h = pred.height();
  const int w = pred.width();
  if (h < kSsimWindow || w < kSsimWindow) {
    throw ShapeError("ssim: image " + std::to_string(h) + "x" + std::to_string(w) +
                     " is smaller than the 11x11 window");
  }
  const auto x = luminance(pred);
  const auto y = luminance(gt);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto g = gaussian_1d();
  const auto mx = filter_valid(x, h, w, g);
  const auto my = filter_valid(y, h, w, g);
  const auto mxx = filter_valid(xx, h, w, g);
  const auto myy = filter_valid(yy, h, w, g);
  const auto mxy = filter_valid(xy, h, w, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cov = mxy[i] - mx[i] * my[i];
    sum += ((2.0 * mx[i] * my[i] + kSsimC1) * (2.0 * cov + kSsimC2)) /
           ((mx[i] * mx[i] + my[i] * my[i] + kSsimC1) * (vx + vy + kSsimC2));
  }
  return sum / static_cast<double>(mx.size());
}

double angular_error(const ImagePlane& pred, const ImagePlane& gt) {
  require_same_shape(pred, gt, "angular_error");
  if (pred.channels() != 3) {
    throw ShapeError("angular_error: expected 3 channels, got " + std::to_string(pred.channels()));
  }
  const std::size_t n = static_cast<std::size_t>(pred.height()) * pred.width();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double a = pred.channel(c)[i];
      const double b = gt.channel(c)[i];
      dot += a * b;
      na += a * a;
      nb += b * b;
    }
    if (na == 0.0 || nb == 0.0) continue;
    const double cosv = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
    sum += std::acos(cosv) * 180.0 / std::numbers::pi;
  }
  return sum / static_cast<double>(n);
}

ImageMetrics aggregate(const std::vector<ImageMetrics>& rows) {
  ImageMetrics m;
  m.id = "mean";
  if (rows.empty()) return m;
  double perceptual = 0.0;
  bool all_perceptual = true;
  for (const auto& r : rows) {
    m.psnr += r.psnr;
    m.ssim += r.ssim;
    m.ae += r.ae;
    if (r.perceptual) {
      perceptual += *r.perceptual;
    } else {
      all_perceptual = false;
    }
  }
  const double n = static_cast<double>(rows.size());
  m.psnr /= n;
  m.ssim /= n;
  m.ae /= n;
  if (all_perceptual) m.perceptual = perceptual / n;
  return m;
}

MetricsReport evaluate(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                       const PerceptualProvider& perceptual) {
  const auto pred = png_stems(pred_dir);
  const auto gt = png_stems(gt_dir);
  std::vector<std::string> unmatched;
  for (const auto& [stem, _] : pred) {
    if (!gt.contains(stem)) unmatched.push_back(stem + " (no ground truth)");
  }
  for (const auto& [stem, _] : gt) {
    if (!pred.contains(stem)) unmatched.push_back(stem + " (no prediction)");
  }
  if (!unmatched.empty()) {
    std::string msg = "unmatched stems:";
    for (const auto& s : unmatched) msg += " " + s;
    throw DataError(msg);
  }
  MetricsReport report;
  for (const auto& [stem, path] : pred) {
    const ImagePlane p = read_png(path, ColorSpace::kRgb);
    const ImagePlane g = read_png(gt.at(stem), ColorSpace::kRgb);
    ImageMetrics m;
    m.id = stem;
    m.psnr = psnr(p, g);
    m.ssim = ssim(p, g);
    m.ae = angular_error(p, g);
    if (perceptual) m.perceptual = perceptual(p, g);
    report.per_image.push_back(std::move(m));
  }
  report.aggregate = aggregate(report.per_image);
  return report;
}

void write_report(const MetricsReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "report.csv", std::ios::trunc);
  csv << std::setprecision(10) << "id,psnr,ssim,ae,perceptual\n";
  auto row = [&](const ImageMetrics& m) {
    csv << m.id << ',' << m.psnr << ',' << m.ssim << ',' << m.ae << ',';
    if (m.perceptual) csv << *m.perceptual;
    csv << '\n';
  };
  for (const auto& m : report.per_image) row(m);
  row(report.aggregate);

  auto to_json = [](const ImageMetrics& m) {
    nlohmann::json j = {{"id", m.id}, {"psnr", m.psnr}, {"ssim", m.ssim}, {"ae", m.ae}};
    j["perceptual"] = m.perceptual ? nlohmann::json(*m.perceptual) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json j;
  j["per_image"] = nlohmann::json::array();
  for (const auto& m : report.per_image) j["per_image"].push_back(to_json(m));
  j["aggregate"] = to_json(report.aggregate);
  std::ofstream js(out_dir / "report.json", std::ios::trunc);
  js << j.dump(2) << '\n';
  if (!csv || !js) {
    throw DataError("cannot write report into " + out_dir.string());
  }
}

}  // namespace mcfnet
