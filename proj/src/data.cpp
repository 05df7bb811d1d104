// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>

#include "mcfnet/cfem.hpp"
#include "mcfnet/errors.hpp"
#include "mcfnet/image_tensor.hpp"
#include "mcfnet/nn/ops.hpp"
#include "mcfnet/png_io.hpp"

namespace mcfnet {

namespace fs = std::filesystem;

const SamplePair& Dataset::nir_pool(std::size_t i) const {
  return i < pairs.size() ? pairs[i] : nir_only.at(i - pairs.size());
}

const ImagePlane& Dataset::rgb_pool(std::size_t i) const {
  return i < pairs.size() ? *pairs[i].rgb : rgb_only.at(i - pairs.size()).rgb;
}

const std::string& Dataset::rgb_pool_id(std::size_t i) const {
  return i < pairs.size() ? pairs[i].id : rgb_only.at(i - pairs.size()).id;
}

std::map<std::string, fs::path> png_stems(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("not a directory: " + dir.string());
  }
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") {
      out.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return out;
}

Dataset load_pairs(const fs::path& nir_dir, const fs::path& rgb_dir, bool allow_unpaired) {
  const auto nir_files = png_stems(nir_dir);
  const auto rgb_files = png_stems(rgb_dir);

  std::vector<std::string> nir_missing;
  std::vector<std::string> rgb_missing;
  for (const auto& [stem, _] : nir_files) {
    if (!rgb_files.contains(stem)) rgb_missing.push_back(stem);
  }
  for (const auto& [stem, _] : rgb_files) {
    if (!nir_files.contains(stem)) nir_missing.push_back(stem);
  }
  if (!allow_unpaired && (!nir_missing.empty() || !rgb_missing.empty())) {
    std::string msg = "unmatched stems:";
    for (const auto& s : rgb_missing) msg += " " + s + " (no RGB counterpart)";
    for (const auto& s : nir_missing) msg += " " + s + " (no NIR counterpart)";
    throw DataError(msg);
  }

  Dataset ds;
  for (const auto& [stem, nir_path] : nir_files) {
    ImagePlane nir = read_png(nir_path, ColorSpace::kNir);
    auto it = rgb_files.find(stem);
    if (it == rgb_files.end()) {
      ds.nir_only.push_back({stem, std::move(nir), std::nullopt});
      continue;
    }
    ImagePlane rgb = read_png(it->second, ColorSpace::kRgb);
    if (rgb.height() != nir.height() || rgb.width() != nir.width()) {
      throw DataError("size mismatch for stem " + stem + ": NIR " +
                      std::to_string(nir.height()) + "x" + std::to_string(nir.width()) +
                      ", RGB " + std::to_string(rgb.height()) + "x" +
                      std::to_string(rgb.width()));
    }
    ds.pairs.push_back({stem, std::move(nir), std::move(rgb)});
  }
  for (const auto& stem : nir_missing) {
    ds.rgb_only.push_back({stem, read_png(rgb_files.at(stem), ColorSpace::kRgb)});
  }
  return ds;
}

void write_pairs(const fs::path& dir, const std::vector<SamplePair>& pairs) {
  fs::create_directories(dir / "nir");
  fs::create_directories(dir / "rgb");
  for (const auto& p : pairs) {
    write_png(dir / "nir" / (p.id + ".png"), p.nir);
    if (p.rgb) write_png(dir / "rgb" / (p.id + ".png"), *p.rgb);
  }
}

void AugmentSpec::validate() const {
  if (!(resize_min > 0.0) || resize_max < resize_min) {
    throw ConfigError("augment: resize range must satisfy 0 < min <= max");
  }
  if (crop_size < 8 || crop_size % 8 != 0) {
    throw ConfigError("augment: crop_size " + std::to_string(crop_size) +
                      " must be a positive multiple of 8");
  }
  if (!(contrast_min > 0.0) || contrast_max < contrast_min) {
    throw ConfigError("augment: contrast range must satisfy 0 < min <= max");
  }
  if (mirror_prob < 0.0 || mirror_prob > 1.0) {
    throw ConfigError("augment: mirror_prob must lie in [0,1]");
  }
}

namespace {

struct AugmentDraw {
  int resized_h = 0;
  int resized_w = 0;
  int top = 0;
  int left = 0;
  bool mirror = false;
  double contrast = 1.0;
};

AugmentDraw draw_augment(int h, int w, const AugmentSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AugmentDraw d;
  const double s = spec.resize_min + (spec.resize_max - spec.resize_min) * unit(rng);
  d.resized_h = static_cast<int>(std::lround(h * s));
  d.resized_w = static_cast<int>(std::lround(w * s));
  if (spec.crop_size > d.resized_h || spec.crop_size > d.resized_w) {
    throw DataError("augment: crop " + std::to_string(spec.crop_size) + " exceeds resized image " +
                    std::to_string(d.resized_h) + "x" + std::to_string(d.resized_w));
  }
  const int max_top = d.resized_h - spec.crop_size;
  const int max_left = d.resized_w - spec.crop_size;
  if (spec.random_crop) {
    d.top = std::uniform_int_distribution<int>(0, max_top)(rng);
    d.left = std::uniform_int_distribution<int>(0, max_left)(rng);
  } else {
    d.top = max_top / 2;
    d.left = max_left / 2;
  }
  d.mirror = unit(rng) < spec.mirror_prob;
  d.contrast = spec.contrast_min + (spec.contrast_max - spec.contrast_min) * unit(rng);
  return d;
}

ImagePlane apply_augment(const ImagePlane& img, const AugmentDraw& d, int crop) {
  const nn::Var resized =
      nn::resize_bilinear(nn::Var::constant(to_tensor(img)), d.resized_h, d.resized_w);
  const nn::Tensor& t = resized.value();
  ImagePlane out(crop, crop, img.space());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < crop; ++y) {
      for (int x = 0; x < crop; ++x) {
        const int sx = d.mirror ? crop - 1 - x : x;
        const double v = t.at(0, c, d.top + y, d.left + sx);
        out.at(y, x, c) = std::clamp(0.5 + d.contrast * (v - 0.5), 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace

SamplePair augment(const SamplePair& pair, const AugmentSpec& spec) {
  if (pair.rgb &&
      (pair.rgb->height() != pair.nir.height() || pair.rgb->width() != pair.nir.width())) {
    throw DataError("augment: pair " + pair.id + " members differ in size");
  }
  const AugmentDraw d = draw_augment(pair.nir.height(), pair.nir.width(), spec);
  SamplePair out{pair.id, apply_augment(pair.nir, d, spec.crop_size), std::nullopt};
  if (pair.rgb) out.rgb = apply_augment(*pair.rgb, d, spec.crop_size);
  return out;
}

std::uint64_t sample_seed(std::uint64_t global_seed, int epoch, const std::string& id) {
  const uLong crc =
      crc32(0L, reinterpret_cast<const Bytef*>(id.data()), static_cast<uInt>(id.size()));
  // splitmix64 finaliser over the combined key.
  std::uint64_t z = global_seed ^ (static_cast<std::uint64_t>(epoch) << 32) ^ crc;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::array<double, 3> synthetic_colormap(double v) {
  const double s = std::sin(std::numbers::pi * v);
  return {v, 0.2 + 0.6 * s * s, 1.0 - v};
}

std::vector<SamplePair> make_synthetic_pairs(int n, int size, std::uint64_t seed) {
  require_divisible_by_8(size, size, "make_synthetic_pairs");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto octave = [&](int grid) {
    nn::Tensor coarse({1, 1, grid, grid});
    for (double& v : coarse.values()) v = unit(rng);
    return nn::resize_bilinear(nn::Var::constant(std::move(coarse)), size, size).value();
  };

  std::vector<SamplePair> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const nn::Tensor low = octave(std::max(2, size / 16));
    const nn::Tensor high = octave(std::max(2, size / 4));
    std::vector<double> field(low.size());
    for (std::size_t j = 0; j < field.size(); ++j) field[j] = low[j] + 0.25 * high[j];
    const auto [lo, hi] = std::ranges::minmax(field);
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : field) v = 0.05 + 0.9 * (v - lo) / span;

    ImagePlane nir(size, size, ColorSpace::kNir, field);
    ImagePlane rgb(size, size, ColorSpace::kRgb);
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const auto c = synthetic_colormap(nir.at(y, x, 0));
        for (int k = 0; k < 3; ++k) rgb.at(y, x, k) = c[k];
      }
    }
    char id[32];
    std::snprintf(id, sizeof id, "synth_%04d", i);
    out.push_back({id, std::move(nir), std::move(rgb)});
  }
  return out;
}

BatchSampler::BatchSampler(const Dataset& dataset, BatchMode mode, int batch_size,
                           std::uint64_t seed)
    : mode_(mode),
      batch_size_(batch_size),
      rng_(seed),
      nir_pool_(mode == BatchMode::kPaired ? dataset.pairs.size() : dataset.nir_pool_size()),
      rgb_pool_(mode == BatchMode::kPaired ? dataset.pairs.size() : dataset.rgb_pool_size()) {
  if (batch_size < 1) {
    throw ConfigError("batch_size must be positive");
  }
  if (mode == BatchMode::kPaired && dataset.pairs.empty()) {
    throw DataError("paired sampling requested but the dataset has no paired samples");
  }
  if (nir_pool_ == 0 || rgb_pool_ == 0) {
    throw DataError("unpaired sampling needs at least one NIR and one RGB image");
  }
  epoch_items_ = nir_pool_;
}

int BatchSampler::batches_per_epoch() const {
  return static_cast<int>((epoch_items_ + batch_size_ - 1) / batch_size_);
}

std::size_t BatchSampler::draw(Stream& s, std::size_t pool) {
  if (s.pos == s.order.size()) {
    s.order.resize(pool);
    std::iota(s.order.begin(), s.order.end(), std::size_t{0});
    std::ranges::shuffle(s.order, rng_);
    s.pos = 0;
  }
  return s.order[s.pos++];
}

BatchIndices BatchSampler::next() {
  const std::size_t count =
      std::min<std::size_t>(batch_size_, epoch_items_ - emitted_in_epoch_);
  BatchIndices b;
  b.mode = mode_;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = draw(nir_, nir_pool_);
    b.nir.push_back(n);
    b.rgb.push_back(mode_ == BatchMode::kPaired ? n : draw(rgb_, rgb_pool_));
  }
  emitted_in_epoch_ += count;
  if (emitted_in_epoch_ == epoch_items_) emitted_in_epoch_ = 0;
  return b;
}

Batch make_batch(const Dataset& dataset, const BatchIndices& idx, const AugmentSpec* augment_spec,
                 std::uint64_t seed, int epoch) {
  Batch batch;
  batch.mode = idx.mode;
  std::vector<ImagePlane> nirs;
  std::vector<ImagePlane> rgbs;
  for (std::size_t i = 0; i < idx.nir.size(); ++i) {
    if (idx.mode == BatchMode::kPaired) {
      const SamplePair& p = dataset.pairs.at(idx.nir[i]);
      SamplePair s = p;
      if (augment_spec) {
        AugmentSpec spec = *augment_spec;
        spec.seed = sample_seed(seed, epoch, p.id);
        s = augment(p, spec);
      }
      batch.nir_ids.push_back(p.id);
      batch.rgb_ids.push_back(p.id);
      nirs.push_back(std::move(s.nir));
      rgbs.push_back(std::move(*s.rgb));
    } else {
      const SamplePair& n = dataset.nir_pool(idx.nir[i]);
      const std::string& rgb_id = dataset.rgb_pool_id(idx.rgb[i]);
      SamplePair nir_only{n.id, n.nir, std::nullopt};
      SamplePair rgb_side{rgb_id, ImagePlane(), dataset.rgb_pool(idx.rgb[i])};
      if (augment_spec) {
        AugmentSpec spec = *augment_spec;
        spec.seed = sample_seed(seed, epoch, n.id);
        nir_only = augment(nir_only, spec);
        spec.seed = sample_seed(seed, epoch, "rgb:" + rgb_id);
        // Augment the RGB image through a placeholder NIR of the same size.
        SamplePair carrier{rgb_id, ImagePlane(rgb_side.rgb->height(), rgb_side.rgb->width(),
                                              ColorSpace::kNir),
                           rgb_side.rgb};
        rgb_side.rgb = augment(carrier, spec).rgb;
      }
      batch.nir_ids.push_back(n.id);
      batch.rgb_ids.push_back(rgb_id);
      nirs.push_back(std::move(nir_only.nir));
      rgbs.push_back(std::move(*rgb_side.rgb));
    }
  }
  batch.nir = to_batch(nirs);
  batch.rgb = to_batch(rgbs);
  return batch;
}

}  // namespace mcfnet
