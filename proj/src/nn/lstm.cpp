// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/nn/lstm.hpp"

namespace evf::nn {

LstmCell::LstmCell(Eigen::Index input_size, Eigen::Index units, Rng& rng) : units_(units) {
  wx_ = std::make_shared<Parameter>("wx", init_uniform({input_size, 4 * units}, units, rng));
  wh_ = std::make_shared<Parameter>("wh", init_uniform({units, 4 * units}, units, rng));
  Tensor bias = Tensor::zeros({4 * units});
  for (Eigen::Index i = units; i < 2 * units; ++i) bias[i] = 1.0;  // forget gate
  b_ = std::make_shared<Parameter>("b", std::move(bias));
}

Var LstmCell::run(const Var& x, Eigen::Index dilation, bool reverse) const {
  const Eigen::Index b = x.value().dim(0), t_total = x.value().dim(1);
  if (t_total < dilation) throw Error("lstm: sequence shorter than dilation");
  const Eigen::Index h = units_;

  Var zero_state = constant(Tensor::zeros({b, h}));
  std::vector<Var> hs(static_cast<std::size_t>(t_total));
  std::vector<Var> cs(static_cast<std::size_t>(t_total));

  for (Eigen::Index step = 0; step < t_total; ++step) {
    const Eigen::Index t = reverse ? t_total - 1 - step : step;
    const Eigen::Index t_prev = reverse ? t + dilation : t - dilation;
    const bool has_prev = t_prev >= 0 && t_prev < t_total;
    const Var& h_prev = has_prev ? hs[static_cast<std::size_t>(t_prev)] : zero_state;
    const Var& c_prev = has_prev ? cs[static_cast<std::size_t>(t_prev)] : zero_state;

    Var xt = reshape(narrow(x, 1, t, 1), {b, x.value().dim(2)});
    Var gates = add(add(matmul(xt, wx_->var), matmul(h_prev, wh_->var)), expand(b_->var, 0, b));
    Var i = sigmoid_v(narrow(gates, 1, 0, h));
    Var f = sigmoid_v(narrow(gates, 1, h, h));
    Var g = tanh_v(narrow(gates, 1, 2 * h, h));
    Var o = sigmoid_v(narrow(gates, 1, 3 * h, h));
    Var c = add(mul(f, c_prev), mul(i, g));
    hs[static_cast<std::size_t>(t)] = mul(o, tanh_v(c));
    cs[static_cast<std::size_t>(t)] = c;
  }

  std::vector<Var> frames;
  frames.reserve(hs.size());
  for (auto& hv : hs) frames.push_back(reshape(hv, {b, 1, h}));
  return cat(frames, 1);
}

void LstmCell::collect(const std::string& prefix, ParameterList* out) const {
  wx_->name = prefix + ".wx";
  wh_->name = prefix + ".wh";
  b_->name = prefix + ".b";
  out->push_back(wx_);
  out->push_back(wh_);
  out->push_back(b_);
}

BiDilatedLstm::BiDilatedLstm(Eigen::Index input_size, Eigen::Index units,
                             std::vector<Eigen::Index> dilations, Rng& rng, bool bidirectional)
    : units_(units), bidirectional_(bidirectional), dilations_(std::move(dilations)) {
  if (dilations_.empty()) throw Error("lstm: at least one layer required");
  Eigen::Index in = input_size;
  for (std::size_t i = 0; i < dilations_.size(); ++i) {
    forward_cells_.emplace_back(in, units, rng);
    if (bidirectional_) backward_cells_.emplace_back(in, units, rng);
    in = bidirectional_ ? 2 * units : units;
  }
}

Var BiDilatedLstm::forward(const Var& x, ForwardCtx&) {
  Var cur = x;
  for (std::size_t i = 0; i < dilations_.size(); ++i) {
    Var fwd = forward_cells_[i].run(cur, dilations_[i], false);
    if (bidirectional_) {
      Var bwd = backward_cells_[i].run(cur, dilations_[i], true);
      cur = cat({fwd, bwd}, 2);
    } else {
      cur = fwd;
    }
  }
  return cur;
}

Shape BiDilatedLstm::output_shape(const Shape& in) const {
  return {in[0], in[1], output_features()};
}

Eigen::Index BiDilatedLstm::output_features() const {
  return bidirectional_ ? 2 * units_ : units_;
}

void BiDilatedLstm::collect(const std::string& prefix, ParameterList* out) {
  for (std::size_t i = 0; i < forward_cells_.size(); ++i) {
    forward_cells_[i].collect(prefix + ".l" + std::to_string(i) + ".fwd", out);
    if (bidirectional_)
      backward_cells_[i].collect(prefix + ".l" + std::to_string(i) + ".bwd", out);
  }
}

}  // namespace evf::nn
