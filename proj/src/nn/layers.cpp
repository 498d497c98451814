// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/nn/layers.hpp"

#include <cmath>

namespace evf::nn {

Layer* Graph::add(std::string name, std::unique_ptr<Layer> layer) {
  names_.push_back(std::move(name));
  layers_.push_back(std::move(layer));
  return layers_.back().get();
}

Var Graph::forward(Var x, ForwardCtx& ctx) const {
  for (const auto& layer : layers_) x = layer->forward(x, ctx);
  return x;
}

ParameterList Graph::params() const {
  ParameterList out;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->collect(names_[i], &out);
  return out;
}

std::vector<std::pair<std::string, Tensor*>> Graph::state() const {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->collect_state(names_[i], &out);
  return out;
}

std::vector<LayerDesc> Graph::walk(const Shape& input) const {
  std::vector<LayerDesc> rows;
  Shape cur = input;
  for (const auto& layer : layers_) {
    cur = layer->output_shape(cur);
    rows.push_back({layer->op_name(), layer->kernel_shape(), cur});
  }
  return rows;
}

Tensor init_uniform(Shape shape, Eigen::Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  return Tensor::uniform(std::move(shape), rng, -bound, bound);
}

DenseLayer::DenseLayer(Eigen::Index in, Eigen::Index out, Rng& rng) {
  w_ = std::make_shared<Parameter>("w", init_uniform({in, out}, in, rng));
  b_ = std::make_shared<Parameter>("b", Tensor::zeros({out}));
}

Var DenseLayer::forward(const Var& x, ForwardCtx&) { return dense(x, w_->var, b_->var); }

Shape DenseLayer::output_shape(const Shape& in) const {
  Shape s = in;
  s.back() = w_->tensor().dim(1);
  return s;
}

void DenseLayer::collect(const std::string& prefix, ParameterList* out) {
  w_->name = prefix + ".w";
  b_->name = prefix + ".b";
  out->push_back(w_);
  out->push_back(b_);
}

Conv1dLayer::Conv1dLayer(Eigen::Index k, Eigen::Index cin, Eigen::Index cout, Eigen::Index stride,
                         Padding pad, Rng& rng, Eigen::Index dilation)
    : stride_(stride), dilation_(dilation), pad_(pad) {
  w_ = std::make_shared<Parameter>("w", init_uniform({k, cin, cout}, k * cin, rng));
  b_ = std::make_shared<Parameter>("b", Tensor::zeros({cout}));
}

Var Conv1dLayer::forward(const Var& x, ForwardCtx&) {
  Var y = conv1d(x, w_->var, stride_, pad_, dilation_);
  const Eigen::Index cout = y.value().dim(2);
  return reshape(add_rowvec(reshape(y, {y.size() / cout, cout}), b_->var), y.shape());
}

Shape Conv1dLayer::output_shape(const Shape& in) const {
  Conv1dGeom g = Conv1dGeom::make(in[0], in[1], in[2], w_->tensor().dim(0), stride_, dilation_,
                                  pad_);
  return {in[0], g.out_len, w_->tensor().dim(2)};
}

void Conv1dLayer::collect(const std::string& prefix, ParameterList* out) {
  w_->name = prefix + ".w";
  b_->name = prefix + ".b";
  out->push_back(w_);
  out->push_back(b_);
}

TConv1dLayer::TConv1dLayer(Eigen::Index k, Eigen::Index cin, Eigen::Index cout,
                           Eigen::Index stride, Rng& rng)
    : stride_(stride) {
  w_ = std::make_shared<Parameter>("w", init_uniform({k, cin, cout}, k * cin, rng));
  b_ = std::make_shared<Parameter>("b", Tensor::zeros({cout}));
}

Var TConv1dLayer::forward(const Var& x, ForwardCtx&) {
  Var y = tconv1d(x, w_->var, stride_);
  const Eigen::Index cout = y.value().dim(2);
  return reshape(add_rowvec(reshape(y, {y.size() / cout, cout}), b_->var), y.shape());
}

Shape TConv1dLayer::output_shape(const Shape& in) const {
  return {in[0], in[1] * stride_, w_->tensor().dim(2)};
}

void TConv1dLayer::collect(const std::string& prefix, ParameterList* out) {
  w_->name = prefix + ".w";
  b_->name = prefix + ".b";
  out->push_back(w_);
  out->push_back(b_);
}

Conv2dLayer::Conv2dLayer(Eigen::Index kh, Eigen::Index kw, Eigen::Index cin, Eigen::Index cout,
                         Eigen::Index stride_h, Eigen::Index stride_w, Padding pad, Rng& rng,
                         Eigen::Index dil_h, Eigen::Index dil_w)
    : stride_h_(stride_h), stride_w_(stride_w), dil_h_(dil_h), dil_w_(dil_w), pad_(pad) {
  w_ = std::make_shared<Parameter>("w", init_uniform({kh, kw, cin, cout}, kh * kw * cin, rng));
  b_ = std::make_shared<Parameter>("b", Tensor::zeros({cout}));
}

Var Conv2dLayer::forward(const Var& x, ForwardCtx&) {
  Var y = conv2d(x, w_->var, stride_h_, stride_w_, pad_, dil_h_, dil_w_);
  const Eigen::Index cout = y.value().dim(3);
  return reshape(add_rowvec(reshape(y, {y.size() / cout, cout}), b_->var), y.shape());
}

Shape Conv2dLayer::output_shape(const Shape& in) const {
  Conv2dGeom g = Conv2dGeom::make(in[0], in[1], in[2], in[3], w_->tensor().dim(0),
                                  w_->tensor().dim(1), stride_h_, stride_w_, dil_h_, dil_w_, pad_);
  return {in[0], g.out_h, g.out_w, w_->tensor().dim(3)};
}

void Conv2dLayer::collect(const std::string& prefix, ParameterList* out) {
  w_->name = prefix + ".w";
  b_->name = prefix + ".b";
  out->push_back(w_);
  out->push_back(b_);
}

TConv2dLayer::TConv2dLayer(Eigen::Index kh, Eigen::Index kw, Eigen::Index cin, Eigen::Index cout,
                           Eigen::Index stride_h, Eigen::Index stride_w, Rng& rng)
    : stride_h_(stride_h), stride_w_(stride_w) {
  w_ = std::make_shared<Parameter>("w", init_uniform({kh, kw, cin, cout}, kh * kw * cin, rng));
  b_ = std::make_shared<Parameter>("b", Tensor::zeros({cout}));
}

Var TConv2dLayer::forward(const Var& x, ForwardCtx&) {
  Var y = tconv2d(x, w_->var, stride_h_, stride_w_);
  const Eigen::Index cout = y.value().dim(3);
  return reshape(add_rowvec(reshape(y, {y.size() / cout, cout}), b_->var), y.shape());
}

Shape TConv2dLayer::output_shape(const Shape& in) const {
  return {in[0], in[1] * stride_h_, in[2] * stride_w_, w_->tensor().dim(3)};
}

void TConv2dLayer::collect(const std::string& prefix, ParameterList* out) {
  w_->name = prefix + ".w";
  b_->name = prefix + ".b";
  out->push_back(w_);
  out->push_back(b_);
}

BatchNormLayer::BatchNormLayer(Eigen::Index features, Rng&, double momentum, double eps)
    : running_mean_(Shape{features}),
      running_var_(Tensor::full({features}, 1.0)),
      momentum_(momentum),
      eps_(eps) {
  gamma_ = std::make_shared<Parameter>("gamma", Tensor::full({features}, 1.0));
  beta_ = std::make_shared<Parameter>("beta", Tensor::zeros({features}));
}

Var BatchNormLayer::forward(const Var& x, ForwardCtx& ctx) {
  const Eigen::Index c = x.value().last_dim();
  if (c != gamma_->tensor().size()) throw Error("batchnorm: feature dimension mismatch");
  const Eigen::Index n = x.size() / c;
  Var x2 = reshape(x, {n, c});

  Var xhat;
  if (ctx.train) {
    Var mu = scale(sum_axis(x2, 0), 1.0 / static_cast<double>(n));
    Var xc = sub(x2, expand(mu, 0, n));
    Var var = scale(sum_axis(mul(xc, xc), 0), 1.0 / static_cast<double>(n));
    xhat = mul(xc, expand(recip(sqrt_v(add_scalar(var, eps_))), 0, n));
    // Running statistics track the batch estimates for later eval passes.
    running_mean_.a() = momentum_ * running_mean_.a() + (1.0 - momentum_) * mu.value().a();
    running_var_.a() = momentum_ * running_var_.a() + (1.0 - momentum_) * var.value().a();
  } else {
    Tensor inv(Shape{c});
    inv.a() = (running_var_.a() + eps_).sqrt().inverse();
    Var xc = sub(x2, expand(constant(running_mean_), 0, n));
    xhat = mul(xc, expand(constant(inv), 0, n));
  }
  Var y = add(mul(xhat, expand(gamma_->var, 0, n)), expand(beta_->var, 0, n));
  return reshape(y, x.shape());
}

void BatchNormLayer::collect(const std::string& prefix, ParameterList* out) {
  gamma_->name = prefix + ".gamma";
  beta_->name = prefix + ".beta";
  out->push_back(gamma_);
  out->push_back(beta_);
}

void BatchNormLayer::collect_state(const std::string& prefix,
                                   std::vector<std::pair<std::string, Tensor*>>* out) {
  out->push_back({prefix + ".running_mean", &running_mean_});
  out->push_back({prefix + ".running_var", &running_var_});
}

Var DropoutLayer::forward(const Var& x, ForwardCtx& ctx) {
  if (!ctx.train || keep_ >= 1.0) return x;
  if (ctx.rng == nullptr) throw Error("dropout: train forward needs an RNG");
  Tensor mask(x.shape());
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask[i] = ctx.rng->uniform() < keep_ ? 1.0 / keep_ : 0.0;
  return apply_mask(x, mask);
}

Var PhaseShuffleLayer::forward(const Var& x, ForwardCtx& ctx) {
  if (!ctx.train || n_ == 0) return x;
  if (ctx.rng == nullptr) throw Error("phase shuffle: train forward needs an RNG");
  std::vector<Eigen::Index> shifts(static_cast<std::size_t>(x.value().dim(0)));
  for (auto& s : shifts) s = ctx.rng->uniform_int(-n_, n_);
  return phase_shuffle(x, shifts);
}

}  // namespace evf::nn
