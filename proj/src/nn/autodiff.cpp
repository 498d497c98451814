// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/nn/autodiff.hpp"

#include <unordered_map>
#include <unordered_set>

#include "evf/nn/ops.hpp"

namespace evf::nn {

namespace {
thread_local bool g_grad_enabled = true;
}

bool GradMode::enabled() { return g_grad_enabled; }

GradMode::Guard::Guard(bool enable) : saved_(g_grad_enabled) { g_grad_enabled = enable; }
GradMode::Guard::~Guard() { g_grad_enabled = saved_; }

Var make_op(Tensor value, std::vector<Var> inputs,
            std::function<std::vector<Var>(const Var&)> backward) {
  bool needs = false;
  if (g_grad_enabled)
    for (const Var& in : inputs)
      if (in.requires_grad()) {
        needs = true;
        break;
      }

  Var out(std::move(value), needs);
  if (needs) {
    auto node = std::make_shared<Node>();
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
    out.p_->node = std::move(node);
  }
  return out;
}

std::vector<Var> grad(const Var& output, const std::vector<Var>& wrt, bool create_graph) {
  if (output.size() != 1) throw Error("grad: output must be a scalar");

  // Post-order over vars reachable through grad-requiring producers.
  std::vector<VarImpl*> order;
  std::unordered_map<VarImpl*, Var> holder;  // keeps impls alive and mapped
  {
    std::unordered_set<VarImpl*> visited;
    struct Frame {
      Var var;
      std::size_t next_input = 0;
    };
    std::vector<Frame> stack;
    if (output.requires_grad()) {
      stack.push_back({output, 0});
      visited.insert(output.impl());
    }
    while (!stack.empty()) {
      Frame& f = stack.back();
      Node* node = f.var.impl()->node.get();
      std::size_t n_inputs = node ? node->inputs.size() : 0;
      if (f.next_input < n_inputs) {
        Var in = node->inputs[f.next_input++];
        if (in.requires_grad() && !visited.count(in.impl())) {
          visited.insert(in.impl());
          stack.push_back({in, 0});
        }
      } else {
        order.push_back(f.var.impl());
        holder.emplace(f.var.impl(), f.var);
        stack.pop_back();
      }
    }
  }

  std::unordered_map<VarImpl*, Var> grads;
  if (output.requires_grad())
    grads[output.impl()] = Var(Tensor::full(output.shape(), 1.0), false);

  GradMode::Guard guard(create_graph);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    VarImpl* impl = *it;
    Node* node = impl->node.get();
    if (node == nullptr) continue;
    auto git = grads.find(impl);
    if (git == grads.end()) continue;
    std::vector<Var> input_grads = node->backward(git->second);
    if (input_grads.size() != node->inputs.size())
      throw Error("grad: backward produced wrong input-gradient count");
    for (std::size_t i = 0; i < input_grads.size(); ++i) {
      const Var& in = node->inputs[i];
      Var& gin = input_grads[i];
      if (!gin.defined() || !in.requires_grad()) continue;
      if (gin.value().shape() != in.shape())
        throw Error("grad: gradient shape mismatch");
      auto slot = grads.find(in.impl());
      if (slot == grads.end())
        grads.emplace(in.impl(), gin);
      else
        slot->second = add(slot->second, gin);
    }
  }

  std::vector<Var> result;
  result.reserve(wrt.size());
  for (const Var& v : wrt) {
    auto it = grads.find(v.impl());
    if (it != grads.end())
      result.push_back(it->second);
    else
      result.push_back(Var(Tensor::zeros(v.shape()), false));
  }
  return result;
}

void backward(const Var& loss, const ParameterList& params, bool create_graph) {
  std::vector<Var> wrt;
  wrt.reserve(params.size());
  for (const auto& p : params) wrt.push_back(p->var);
  std::vector<Var> gs = grad(loss, wrt, create_graph);
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->grad = gs[i].value();
}

}  // namespace evf::nn
