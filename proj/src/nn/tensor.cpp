// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/nn/tensor.hpp"

#include <algorithm>

#include "mcfnet/errors.hpp"

namespace mcfnet::nn {

std::string Shape::str() const {
  return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
         std::to_string(w) + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
    throw ShapeError("Tensor: negative extent " + shape.str());
  }
  data_.assign(shape.numel(), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape.numel()) {
    throw ShapeError("Tensor: " + shape.str() + " needs " + std::to_string(shape.numel()) +
                     " values, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::sample(int n) const {
  Shape s = shape_;
  s.n = 1;
  const std::size_t count = s.numel();
  std::vector<double> out(data_.begin() + static_cast<std::ptrdiff_t>(n * count),
                          data_.begin() + static_cast<std::ptrdiff_t>((n + 1) * count));
  return Tensor(s, std::move(out));
}

void Tensor::fill(double v) { std::ranges::fill(data_, v); }

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ShapeError("Tensor::item on " + shape_.str());
  }
  return data_[0];
}

Tensor stack(std::span<const Tensor> samples) {
  if (samples.empty()) {
    throw ShapeError("stack: no samples");
  }
  Shape s = samples.front().shape();
  if (s.n != 1) {
    throw ShapeError("stack: expected batch-1 samples, got " + s.str());
  }
  std::vector<double> data;
  data.reserve(s.numel() * samples.size());
  for (const auto& t : samples) {
    if (t.shape() != s) {
      throw ShapeError("stack: shape " + t.shape().str() + " differs from " + s.str());
    }
    data.insert(data.end(), t.values().begin(), t.values().end());
  }
  s.n = static_cast<int>(samples.size());
  return Tensor(s, std::move(data));
}

}  // namespace mcfnet::nn
