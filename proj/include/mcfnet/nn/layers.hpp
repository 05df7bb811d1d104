// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mcfnet/nn/autograd.hpp"

namespace mcfnet::nn {

using Rng = std::mt19937_64;

struct NamedParam {
  std::string name;  // fully qualified, e.g. "grm.enc2.weight"
  Var var;
};

/// A named set of trainable tensors (one network branch). Layers hold Var
/// handles into the group, so updating a group updates the layers.
class ParamGroup {
 public:
  explicit ParamGroup(std::string name = {}) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  std::span<const NamedParam> params() const { return params_; }

  /// Weight drawn from N(0, stddev); stddev == 0 gives zeros.
  Var create(const std::string& local_name, Shape shape, double stddev, Rng& rng);

  const NamedParam* find(const std::string& name) const;

  /// Total scalar count.
  std::size_t numel() const;
  void zero_grad();
  void set_requires_grad(bool on);
  /// True if some parameter has a gradient with a nonzero entry.
  bool has_nonzero_grad() const;

 private:
  std::string name_;
  std::vector<NamedParam> params_;
};

inline constexpr double kInitStddev = 0.02;

struct Conv2d {
  Var weight;
  Var bias;
  int stride = 1;
  int pad = 0;

  Var operator()(const Var& x) const;
  int out_channels() const { return weight.shape().n; }
};

struct ConvTranspose2d {
  Var weight;
  Var bias;
  int stride = 2;
  int pad = 1;

  Var operator()(const Var& x) const;
};

Conv2d make_conv(ParamGroup& group, const std::string& name, int in, int out, int kernel,
                 int stride, int pad, Rng& rng, bool with_bias = true);

/// Kernel 4, stride 2, padding 1: doubles the spatial extent.
ConvTranspose2d make_up_conv(ParamGroup& group, const std::string& name, int in, int out,
                             Rng& rng);

}  // namespace mcfnet::nn
