// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "evf/nn/autodiff.hpp"

namespace evf::nn {

// Adam with bias correction.
class Adam {
 public:
  explicit Adam(ParameterList params, double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  // Applies one update from each parameter's current gradient.
  void step();

  void set_lr(double lr) { lr_ = lr; }
  std::int64_t t() const { return t_; }

 private:
  ParameterList params_;
  std::vector<Tensor> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
};

}  // namespace evf::nn
