// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mcfnet/image.hpp"
#include "mcfnet/nn/tensor.hpp"

namespace mcfnet {

struct SamplePair {
  std::string id;
  ImagePlane nir;
  std::optional<ImagePlane> rgb;  // absent for NIR-only samples
};

struct RgbSample {
  std::string id;
  ImagePlane rgb;
};

/// Paired samples plus any NIR-only / RGB-only extras used for unpaired
/// batches.
struct Dataset {
  std::vector<SamplePair> pairs;     // both members present
  std::vector<SamplePair> nir_only;  // rgb absent
  std::vector<RgbSample> rgb_only;

  bool empty() const { return pairs.empty() && nir_only.empty() && rgb_only.empty(); }

  // Unpaired pools: pairs first, then the extras.
  std::size_t nir_pool_size() const { return pairs.size() + nir_only.size(); }
  std::size_t rgb_pool_size() const { return pairs.size() + rgb_only.size(); }
  const SamplePair& nir_pool(std::size_t i) const;
  const ImagePlane& rgb_pool(std::size_t i) const;
  const std::string& rgb_pool_id(std::size_t i) const;
};

/// `<stem>.png` files of `dir` (case-insensitive extension) keyed by stem.
/// Throws DataError if `dir` is not a directory.
std::map<std::string, std::filesystem::path> png_stems(const std::filesystem::path& dir);

/// Pairs `<stem>.png` files across the two directories by stem, in
/// lexicographic order. Unmatched stems become extras when `allow_unpaired`
/// is set and raise DataError otherwise. Empty directories give an empty
/// dataset.
Dataset load_pairs(const std::filesystem::path& nir_dir, const std::filesystem::path& rgb_dir,
                   bool allow_unpaired = false);

/// Writes `dir/nir/<id>.png` and, when present, `dir/rgb/<id>.png`.
void write_pairs(const std::filesystem::path& dir, const std::vector<SamplePair>& pairs);

struct AugmentSpec {
  double resize_min = 1.0;  // scale interval applied before cropping
  double resize_max = 1.2;
  int crop_size = 256;
  bool random_crop = true;  // false: centred crop
  double contrast_min = 0.8;
  double contrast_max = 1.2;
  double mirror_prob = 0.5;
  std::uint64_t seed = 0;

  static AugmentSpec desk() {
    AugmentSpec s;
    s.crop_size = 64;
    return s;
  }

  /// Throws ConfigError on inconsistent ranges or a crop not divisible by 8.
  void validate() const;
  bool operator==(const AugmentSpec&) const = default;
};

/// Resize, crop, mirror and contrast drawn once from `spec.seed` and applied
/// identically to both members. Contrast rescales about 0.5 then clamps to
/// [0,1]. Throws DataError when the crop exceeds the resized image.
SamplePair augment(const SamplePair& pair, const AugmentSpec& spec);

/// Seed for one sample in one epoch; independent of worker scheduling.
std::uint64_t sample_seed(std::uint64_t global_seed, int epoch, const std::string& id);

/// Deterministic injective colormap used by the synthetic dataset.
std::array<double, 3> synthetic_colormap(double v);

/// n pairs of size x size: NIR is a smoothed random field, RGB its
/// colormap. Throws ShapeError unless size is a positive multiple of 8.
std::vector<SamplePair> make_synthetic_pairs(int n, int size, std::uint64_t seed);

enum class BatchMode { kPaired, kUnpaired };

/// Indices of one batch. Paired batches index `pairs` on both sides;
/// unpaired batches index the NIR and RGB pools independently.
struct BatchIndices {
  BatchMode mode = BatchMode::kPaired;
  std::vector<std::size_t> nir;
  std::vector<std::size_t> rgb;
};

/// Draws batches uniformly without replacement within an epoch. A new
/// permutation starts when a pool is exhausted.
class BatchSampler {
 public:
  BatchSampler(const Dataset& dataset, BatchMode mode, int batch_size, std::uint64_t seed);

  int batches_per_epoch() const;
  BatchIndices next();

 private:
  struct Stream {
    std::vector<std::size_t> order;
    std::size_t pos = 0;
  };
  std::size_t draw(Stream& s, std::size_t pool);

  BatchMode mode_;
  int batch_size_;
  std::size_t epoch_items_;
  std::size_t emitted_in_epoch_ = 0;
  std::mt19937_64 rng_;
  Stream nir_;
  Stream rgb_;
  std::size_t nir_pool_;
  std::size_t rgb_pool_;
};

/// One sampled batch as tensors plus the ids behind each row.
struct Batch {
  BatchMode mode = BatchMode::kPaired;
  std::vector<std::string> nir_ids;
  std::vector<std::string> rgb_ids;
  nn::Tensor nir;  // N x 1 x H x W
  nn::Tensor rgb;  // N x 3 x H x W
};

/// Materialises `idx`, augmenting each sample when `augment_spec` is given
/// (its seed is replaced per sample by sample_seed(seed, epoch, id)).
Batch make_batch(const Dataset& dataset, const BatchIndices& idx,
                 const AugmentSpec* augment_spec, std::uint64_t seed, int epoch);

}  // namespace mcfnet
