// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/nn/adam.hpp"

#include <cmath>

namespace evf::nn {

Adam::Adam(ParameterList params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_) {
    m_.emplace_back(p->tensor().shape());
    v_.emplace_back(p->tensor().shape());
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto g = params_[i]->grad.a();
    m_[i].a() = beta1_ * m_[i].a() + (1.0 - beta1_) * g;
    v_[i].a() = beta2_ * v_[i].a() + (1.0 - beta2_) * g.square();
    params_[i]->tensor().a() -=
        lr_ * (m_[i].a() / bc1) / ((v_[i].a() / bc2).sqrt() + eps_);
  }
}

}  // namespace evf::nn
