// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "mcfnet/nn/layers.hpp"

namespace mcfnet::nn {

struct AdamOptions {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adaptive moment estimation over a fixed list of parameters.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Var> params, AdamOptions options);

  void set_lr(double lr) { options_.lr = lr; }
  double lr() const { return options_.lr; }

  /// Applies one update from the accumulated gradients. Parameters without
  /// a gradient buffer are skipped.
  void step();
  void zero_grad();

  std::int64_t steps() const { return steps_; }
  const std::vector<Tensor>& first_moments() const { return m_; }
  const std::vector<Tensor>& second_moments() const { return v_; }
  const std::vector<Var>& params() const { return params_; }

  /// Restores serialized state; shapes must match the parameter list.
  void restore(std::int64_t steps, std::vector<Tensor> m, std::vector<Tensor> v);

 private:
  std::vector<Var> params_;
  AdamOptions options_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t steps_ = 0;
};

}  // namespace mcfnet::nn
