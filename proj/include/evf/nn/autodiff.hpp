// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "evf/tensor.hpp"

namespace evf::nn {

class Var;

// A recorded operation. `backward` maps the output gradient to one gradient
// per input (undefined Vars for inputs that do not need one). Backward rules
// are themselves written with Vars and ops, so gradients can be recorded and
// differentiated again (needed by the gradient penalty).
struct Node {
  std::vector<Var> inputs;
  std::function<std::vector<Var>(const Var& grad_out)> backward;
};

struct VarImpl {
  Tensor value;
  bool requires_grad = false;
  std::shared_ptr<Node> node;  // producer, null for leaves
};

// Shared handle to a tensor in the computation graph.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false)
      : p_(std::make_shared<VarImpl>(VarImpl{std::move(value), requires_grad, nullptr})) {}

  bool defined() const { return p_ != nullptr; }
  const Tensor& value() const { return p_->value; }
  Tensor& value() { return p_->value; }
  bool requires_grad() const { return p_ && p_->requires_grad; }
  const Shape& shape() const { return p_->value.shape(); }
  Eigen::Index size() const { return p_->value.size(); }
  VarImpl* impl() const { return p_.get(); }

 private:
  friend Var make_op(Tensor, std::vector<Var>, std::function<std::vector<Var>(const Var&)>);
  std::shared_ptr<VarImpl> p_;
};

// Whether newly created ops are recorded on the tape. Enabled by default;
// disabled inside backward passes unless a higher-order graph is requested.
class GradMode {
 public:
  static bool enabled();

  class Guard {
   public:
    explicit Guard(bool enable);
    ~Guard();
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    bool saved_;
  };
};

using NoGradGuard = GradMode::Guard;  // construct with `false` for eval passes

// Builds an op output: attaches a producer node when recording is on and any
// input requires grad.
Var make_op(Tensor value, std::vector<Var> inputs,
            std::function<std::vector<Var>(const Var&)> backward);

// Gradients of a scalar `output` with respect to each Var in `wrt`.
// Vars that do not participate get zero gradients. With `create_graph` the
// returned gradients carry their own tape and can be differentiated again.
std::vector<Var> grad(const Var& output, const std::vector<Var>& wrt, bool create_graph = false);

// Named trainable leaf.
struct Parameter {
  std::string name;
  Var var;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor value)
      : name(std::move(n)), var(std::move(value), true), grad(var.value().shape()) {}

  Tensor& tensor() { return var.value(); }
  const Tensor& tensor() const { return var.value(); }
};

using ParameterList = std::vector<std::shared_ptr<Parameter>>;

// Runs grad() over all parameters and stores the results in each
// Parameter::grad.
void backward(const Var& loss, const ParameterList& params, bool create_graph = false);

}  // namespace evf::nn
