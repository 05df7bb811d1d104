// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/nn/layers.hpp"

#include <algorithm>

#include "mcfnet/errors.hpp"
#include "mcfnet/nn/ops.hpp"

namespace mcfnet::nn {

Var ParamGroup::create(const std::string& local_name, Shape shape, double stddev, Rng& rng) {
  std::string full = name_.empty() ? local_name : name_ + "." + local_name;
  if (find(full) != nullptr) {
    throw ConfigError("ParamGroup: duplicate parameter " + full);
  }
  Tensor t(shape, 0.0);
  if (stddev > 0.0) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (double& v : t.values()) v = dist(rng);
  }
  Var v = Var::parameter(std::move(t));
  params_.push_back({std::move(full), v});
  return v;
}

const NamedParam* ParamGroup::find(const std::string& name) const {
  auto it = std::ranges::find(params_, name, &NamedParam::name);
  return it == params_.end() ? nullptr : &*it;
}

std::size_t ParamGroup::numel() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.var.value().size();
  return total;
}

void ParamGroup::zero_grad() {
  for (auto& p : params_) {
    Var v = p.var;
    v.zero_grad();
  }
}

void ParamGroup::set_requires_grad(bool on) {
  for (auto& p : params_) {
    Var v = p.var;
    v.set_requires_grad(on);
  }
}

bool ParamGroup::has_nonzero_grad() const {
  for (const auto& p : params_) {
    for (double g : p.var.grad().values()) {
      if (g != 0.0) return true;
    }
  }
  return false;
}

Var Conv2d::operator()(const Var& x) const { return conv2d(x, weight, bias, stride, pad); }

Var ConvTranspose2d::operator()(const Var& x) const {
  return conv_transpose2d(x, weight, bias, stride, pad);
}

Conv2d make_conv(ParamGroup& group, const std::string& name, int in, int out, int kernel,
                 int stride, int pad, Rng& rng, bool with_bias) {
  Conv2d conv;
  conv.weight = group.create(name + ".weight", {out, in, kernel, kernel}, kInitStddev, rng);
  if (with_bias) {
    conv.bias = group.create(name + ".bias", {1, out, 1, 1}, 0.0, rng);
  }
  conv.stride = stride;
  conv.pad = pad;
  return conv;
}

ConvTranspose2d make_up_conv(ParamGroup& group, const std::string& name, int in, int out,
                             Rng& rng) {
  ConvTranspose2d conv;
  conv.weight = group.create(name + ".weight", {in, out, 4, 4}, kInitStddev, rng);
  conv.bias = group.create(name + ".bias", {1, out, 1, 1}, 0.0, rng);
  return conv;
}

}  // namespace mcfnet::nn
