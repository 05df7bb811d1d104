// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures for the test binaries: seeded generators and a central
// finite-difference gradient checker.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mcfnet/image.hpp"
#include "mcfnet/nn/autograd.hpp"
#include "mcfnet/nn/tensor.hpp"

namespace mcfnet::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal(double stddev = 1.0) { return std::normal_distribution<double>(0.0, stddev)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  nn::Tensor tensor(nn::Shape s, double lo = -1.0, double hi = 1.0) {
    nn::Tensor t(s);
    for (double& v : t.values()) v = uniform(lo, hi);
    return t;
  }

  ImagePlane plane(int h, int w, ColorSpace space, double lo = 0.0, double hi = 1.0) {
    ImagePlane img(h, w, space);
    for (double& v : img.values()) v = uniform(lo, hi);
    return img;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct GradCheck {
  std::size_t checked = 0;
  std::size_t passed = 0;
  double worst = 0.0;

  double pass_rate() const { return checked ? static_cast<double>(passed) / checked : 1.0; }
};

/// Relative error with a floor on the denominator so that two near-zero
/// gradients compare as equal.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares the analytic gradient of `loss` with respect to each entry of
/// each input against central differences of step h.
inline GradCheck check_gradients(const std::function<nn::Var()>& loss,
                                 std::vector<nn::Var> inputs, double h = 1e-4,
                                 double tolerance = 1e-3) {
  for (auto& v : inputs) v.zero_grad();
  const nn::Var out = loss();
  nn::backward(out);
  GradCheck r;
  for (auto& v : inputs) {
    const nn::Tensor g = v.grad().empty() ? nn::Tensor(v.shape()) : v.grad();
    for (std::size_t i = 0; i < v.value().size(); ++i) {
      const double saved = v.value()[i];
      v.mutable_value()[i] = saved + h;
      const double up = loss().value().item();
      v.mutable_value()[i] = saved - h;
      const double down = loss().value().item();
      v.mutable_value()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(g[i], numeric);
      ++r.checked;
      if (err <= tolerance) ++r.passed;
      r.worst = std::max(r.worst, err);
    }
  }
  return r;
}

inline double max_abs_diff(const nn::Tensor& a, const nn::Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mcfnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mcfnet::testing
