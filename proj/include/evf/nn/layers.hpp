// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "evf/nn/ops.hpp"

namespace evf::nn {

// Per-forward context: train/eval switch and the RNG that feeds dropout and
// phase shuffle. Eval passes never touch the RNG.
struct ForwardCtx {
  bool train = false;
  Rng* rng = nullptr;
};

// One row of an architecture walk: operation name, kernel shape (empty when
// the operation has none) and output shape including the batch axis.
struct LayerDesc {
  std::string op;
  Shape kernel;
  Shape output;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Var forward(const Var& x, ForwardCtx& ctx) = 0;
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual std::string op_name() const = 0;
  virtual Shape kernel_shape() const { return {}; }
  virtual void collect(const std::string& prefix, ParameterList* out) {}
  // Non-trainable state (batchnorm running statistics).
  virtual void collect_state(const std::string& prefix,
                             std::vector<std::pair<std::string, Tensor*>>* out) {}
};

// Ordered layer stack with named parameters.
class Graph {
 public:
  Layer* add(std::string name, std::unique_ptr<Layer> layer);
  Var forward(Var x, ForwardCtx& ctx) const;
  ParameterList params() const;
  std::vector<std::pair<std::string, Tensor*>> state() const;
  // Shape/kernel walk for conformance checks; `input` includes the batch axis.
  std::vector<LayerDesc> walk(const Shape& input) const;
  std::size_t size() const { return layers_.size(); }
  Layer* layer(std::size_t i) const { return layers_[i].get(); }
  const std::string& name(std::size_t i) const { return names_[i]; }

 private:
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization.
Tensor init_uniform(Shape shape, Eigen::Index fan_in, Rng& rng);

class DenseLayer : public Layer {
 public:
  DenseLayer(Eigen::Index in, Eigen::Index out, Rng& rng);
  Var forward(const Var& x, ForwardCtx&) override;
  Shape output_shape(const Shape& in) const override;
  std::string op_name() const override { return "Dense"; }
  Shape kernel_shape() const override { return w_->tensor().shape(); }
  void collect(const std::string& prefix, ParameterList* out) override;

  std::shared_ptr<Parameter> w_, b_;
};

class Conv1dLayer : public Layer {
 public:
  Conv1dLayer(Eigen::Index k, Eigen::Index cin, Eigen::Index cout, Eigen::Index stride,
              Padding pad, Rng& rng, Eigen::Index dilation = 1);
  Var forward(const Var& x, ForwardCtx&) override;
  Shape output_shape(const Shape& in) const override;
  std::string op_name() const override { return "Conv1D"; }
  Shape kernel_shape() const override { return w_->tensor().shape(); }
  void collect(const std::string& prefix, ParameterList* out) override;

  std::shared_ptr<Parameter> w_, b_;
  Eigen::Index stride_, dilation_;
  Padding pad_;
};

class TConv1dLayer : public Layer {
 public:
  TConv1dLayer(Eigen::Index k, Eigen::Index cin, Eigen::Index cout, Eigen::Index stride, Rng& rng);
  Var forward(const Var& x, ForwardCtx&) override;
  Shape output_shape(const Shape& in) const override;
  std::string op_name() const override { return "TransposeConv1D"; }
  Shape kernel_shape() const override { return w_->tensor().shape(); }
  void collect(const std::string& prefix, ParameterList* out) override;

  std::shared_ptr<Parameter> w_, b_;
  Eigen::Index stride_;
};

class Conv2dLayer : public Layer {
 public:
  Conv2dLayer(Eigen::Index kh, Eigen::Index kw, Eigen::Index cin, Eigen::Index cout,
              Eigen::Index stride_h, Eigen::Index stride_w, Padding pad, Rng& rng,
              Eigen::Index dil_h = 1, Eigen::Index dil_w = 1);
  Var forward(const Var& x, ForwardCtx&) override;
  Shape output_shape(const Shape& in) const override;
  std::string op_name() const override { return dil_h_ > 1 || dil_w_ > 1 ? "DilatedConv2D" : "Conv2D"; }
  Shape kernel_shape() const override { return w_->tensor().shape(); }
  void collect(const std::string& prefix, ParameterList* out) override;

  std::shared_ptr<Parameter> w_, b_;
  Eigen::Index stride_h_, stride_w_, dil_h_, dil_w_;
  Padding pad_;
};

class TConv2dLayer : public Layer {
 public:
  TConv2dLayer(Eigen::Index kh, Eigen::Index kw, Eigen::Index cin, Eigen::Index cout,
               Eigen::Index stride_h, Eigen::Index stride_w, Rng& rng);
  Var forward(const Var& x, ForwardCtx&) override;
  Shape output_shape(const Shape& in) const override;
  std::string op_name() const override { return "TransposeConv2D"; }
  Shape kernel_shape() const override { return w_->tensor().shape(); }
  void collect(const std::string& prefix, ParameterList* out) override;

  std::shared_ptr<Parameter> w_, b_;
  Eigen::Index stride_h_, stride_w_;
};

class MaxPool2dLayer : public Layer {
 public:
  MaxPool2dLayer(Eigen::Index kh, Eigen::Index kw, Eigen::Index stride_h, Eigen::Index stride_w)
      : kh_(kh), kw_(kw), sh_(stride_h), sw_(stride_w) {}
  Var forward(const Var& x, ForwardCtx&) override { return maxpool2d(x, kh_, kw_, sh_, sw_); }
  Shape output_shape(const Shape& in) const override {
    return {in[0], (in[1] - kh_) / sh_ + 1, (in[2] - kw_) / sw_ + 1, in[3]};
  }
  std::string op_name() const override { return "MaxPool2D"; }

  Eigen::Index kh_, kw_, sh_, sw_;
};

class BatchNormLayer : public Layer {
 public:
  BatchNormLayer(Eigen::Index features, Rng& rng, double momentum = 0.9, double eps = 1e-5);
  Var forward(const Var& x, ForwardCtx& ctx) override;
  Shape output_shape(const Shape& in) const override { return in; }
  std::string op_name() const override { return "BatchNorm"; }
  void collect(const std::string& prefix, ParameterList* out) override;
  void collect_state(const std::string& prefix,
                     std::vector<std::pair<std::string, Tensor*>>* out) override;

  std::shared_ptr<Parameter> gamma_, beta_;
  Tensor running_mean_, running_var_;
  double momentum_, eps_;
};

class DropoutLayer : public Layer {
 public:
  explicit DropoutLayer(double keep) : keep_(keep) {
    if (keep <= 0.0 || keep > 1.0) throw Error("dropout: keep must be in (0, 1]");
  }
  Var forward(const Var& x, ForwardCtx& ctx) override;
  Shape output_shape(const Shape& in) const override { return in; }
  std::string op_name() const override { return "Dropout"; }

  double keep_;
};

class ReluLayer : public Layer {
 public:
  Var forward(const Var& x, ForwardCtx&) override { return relu(x); }
  Shape output_shape(const Shape& in) const override { return in; }
  std::string op_name() const override { return "ReLU"; }
};

class LeakyReluLayer : public Layer {
 public:
  explicit LeakyReluLayer(double alpha) : alpha_(alpha) {}
  Var forward(const Var& x, ForwardCtx&) override { return leaky_relu(x, alpha_); }
  Shape output_shape(const Shape& in) const override { return in; }
  std::string op_name() const override { return "LeakyReLU"; }

  double alpha_;
};

class TanhLayer : public Layer {
 public:
  Var forward(const Var& x, ForwardCtx&) override { return tanh_v(x); }
  Shape output_shape(const Shape& in) const override { return in; }
  std::string op_name() const override { return "Tanh"; }
};

// Reshapes the per-example payload; `target` excludes the batch axis.
class ReshapeLayer : public Layer {
 public:
  explicit ReshapeLayer(Shape target) : target_(std::move(target)) {}
  Var forward(const Var& x, ForwardCtx&) override {
    return reshape(x, output_shape(x.shape()));
  }
  Shape output_shape(const Shape& in) const override {
    Shape s{in[0]};
    s.insert(s.end(), target_.begin(), target_.end());
    return s;
  }
  std::string op_name() const override { return "Reshape"; }

  Shape target_;
};

class PhaseShuffleLayer : public Layer {
 public:
  explicit PhaseShuffleLayer(Eigen::Index n) : n_(n) {
    if (n < 0) throw Error("phase shuffle: n must be >= 0");
  }
  Var forward(const Var& x, ForwardCtx& ctx) override;
  Shape output_shape(const Shape& in) const override { return in; }
  std::string op_name() const override { return "PhaseShuffle"; }

  Eigen::Index n_;
};

}  // namespace evf::nn
