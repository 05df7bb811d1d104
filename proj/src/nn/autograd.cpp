// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcfnet/nn/autograd.hpp"

#include <unordered_set>
#include <utility>

#include "mcfnet/errors.hpp"

namespace mcfnet::nn {

Tensor& detail::Node::grad_buffer() {
  if (grad.shape() != value.shape()) {
    grad = Tensor(value.shape(), 0.0);
  }
  return grad;
}

Var Var::constant(Tensor value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var Var::parameter(Tensor value) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

void Var::zero_grad() {
  if (node_ && !node_->grad.empty()) {
    node_->grad.fill(0.0);
  }
}

Var make_result(Tensor value, std::vector<Var> parents,
                std::function<void(detail::Node&)> backward) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  bool any = false;
  for (const auto& p : parents) {
    any = any || p.requires_grad();
  }
  if (any) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) {
      node->parents.push_back(p.shared());
    }
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

Var detach(const Var& v) { return Var::constant(v.value()); }

void backward(const Var& root) {
  if (root.value().size() != 1) {
    throw ShapeError("backward: root must hold one element, got " + root.shape().str());
  }
  if (!root.requires_grad()) {
    return;
  }

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root.node(), 0);
  visited.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->backward && !node->grad.empty()) {
      node->backward(*node);
      // Interior gradients are consumed; only leaves keep theirs.
      if (node != root.node()) node->grad = Tensor();
    }
  }
}

}  // namespace mcfnet::nn
