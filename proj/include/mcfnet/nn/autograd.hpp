// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mcfnet/nn/tensor.hpp"

namespace mcfnet::nn {

namespace detail {

struct Node {
  Tensor value;
  Tensor grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  /// Gradient buffer, zero-initialised to the value shape on first use.
  Tensor& grad_buffer();
};

}  // namespace detail

/// Handle to a node of the dynamic computation graph. Copies share the node,
/// so a parameter Var held by a layer and by a ParamGroup is one object.
class Var {
 public:
  Var() = default;

  static Var constant(Tensor value);
  static Var parameter(Tensor value);

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }

  /// Accumulated gradient; empty until a backward pass reaches this node.
  const Tensor& grad() const { return node_->grad; }
  void zero_grad();

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& shared() const { return node_; }

 private:
  explicit Var(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  friend Var make_result(Tensor, std::vector<Var>, std::function<void(detail::Node&)>);

  std::shared_ptr<detail::Node> node_;
};

/// Builds a graph node. If no parent requires a gradient the result is a
/// constant and `backward` is dropped.
Var make_result(Tensor value, std::vector<Var> parents,
                std::function<void(detail::Node&)> backward);

/// Constant view of `v`'s current value; gradients stop here.
Var detach(const Var& v);

/// Reverse-mode sweep from a single-element root. Gradients accumulate into
/// every reachable node that requires them.
void backward(const Var& root);

}  // namespace mcfnet::nn
