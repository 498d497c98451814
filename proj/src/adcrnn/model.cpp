// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/adcrnn/model.hpp"

#include <algorithm>

namespace evf::adcrnn {

using namespace nn;

void AdcrnnConfig::validate() const {
  if (num_classes < 2) throw Error("adcrnn: need at least two classes");
  if (input_frames < 8 || input_bands < 8) throw Error("adcrnn: input too small");
  if (conv_maps <= 0 || dilated_maps <= 0 || linear_units <= 0 || lstm_units <= 0 ||
      fcn_units <= 0)
    throw Error("adcrnn: layer sizes must be positive");
  if (lstm_dilations.empty()) throw Error("adcrnn: lstm needs at least one layer");
  if (dropout_keep <= 0.0 || dropout_keep > 1.0) throw Error("adcrnn: bad dropout keep");
}

AdcrnnConfig AdcrnnConfig::toy(int num_classes, Eigen::Index frames) {
  AdcrnnConfig cfg;
  cfg.num_classes = num_classes;
  cfg.input_frames = frames;
  cfg.conv_maps = 8;
  cfg.dilated_maps = 16;
  cfg.linear_units = 32;
  cfg.lstm_units = 32;
  cfg.fcn_units = 16;
  return cfg;
}

AdcrnnModel::AdcrnnModel(const AdcrnnConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  conv_ = std::make_unique<Conv2dLayer>(3, 3, cfg.input_channels, cfg.conv_maps, 1, 1,
                                        Padding::kValid, rng);
  pool_ = std::make_unique<MaxPool2dLayer>(2, 4, 2, 4);
  dilated1_ = std::make_unique<Conv2dLayer>(3, 3, cfg.conv_maps, cfg.dilated_maps, 1, 1,
                                            Padding::kSame, rng, 2, 2);
  dilated2_ = std::make_unique<Conv2dLayer>(3, 3, cfg.dilated_maps, cfg.dilated_maps, 1, 1,
                                            Padding::kSame, rng, 2, 2);
  dilated3_ = std::make_unique<Conv2dLayer>(3, 3, cfg.dilated_maps, cfg.dilated_maps, 1, 1,
                                            Padding::kSame, rng, 2, 2);
  skip_adapter_ = std::make_unique<Conv2dLayer>(1, 1, cfg.conv_maps, cfg.dilated_maps, 1, 1,
                                                Padding::kSame, rng);

  const Eigen::Index pooled_bands = (cfg.input_bands - 2 - 4) / 4 + 1;
  linear_ = std::make_unique<DenseLayer>(pooled_bands * cfg.dilated_maps, cfg.linear_units, rng);
  bn_ = std::make_unique<BatchNormLayer>(cfg.linear_units, rng);

  std::vector<Eigen::Index> dilations = cfg.lstm_dilations;
  if (cfg.plain_bilstm) std::fill(dilations.begin(), dilations.end(), 1);
  lstm_ = std::make_unique<BiDilatedLstm>(cfg.linear_units, cfg.lstm_units, dilations, rng);

  attention_z_ = std::make_shared<Parameter>(
      "attention.z", init_uniform({lstm_->output_features()}, lstm_->output_features(), rng));
  fcn_ = std::make_unique<DenseLayer>(lstm_->output_features(), cfg.fcn_units, rng);
  dropout_ = std::make_unique<DropoutLayer>(cfg.dropout_keep);
  classifier_ = std::make_unique<DenseLayer>(cfg.fcn_units, cfg.num_classes, rng);
}

AdcrnnModel::Output AdcrnnModel::forward(const Var& x, ForwardCtx& ctx) const {
  if (x.value().rank() != 4) throw Error("adcrnn: input must be (B, T, bands, channels)");

  Var h = relu(conv_->forward(x, ctx));
  Var pooled = pool_->forward(h, ctx);

  Var d1 = relu(dilated1_->forward(pooled, ctx));
  Var d2 = relu(dilated2_->forward(d1, ctx));
  Var skip = skip_adapter_->forward(pooled, ctx);
  Var d3 = relu(add(dilated3_->forward(d2, ctx), skip));

  const Eigen::Index b = d3.value().dim(0), t = d3.value().dim(1);
  const Eigen::Index per_step = d3.value().dim(2) * d3.value().dim(3);
  Var seq = reshape(d3, {b, t, per_step});
  seq = linear_->forward(seq, ctx);
  seq = bn_->forward(seq, ctx);
  seq = lstm_->forward(seq, ctx);

  Var pooled_seq = attention_pool(seq, attention_z_->var);
  Var features = fcn_->forward(pooled_seq, ctx);
  Var dropped = dropout_->forward(features, ctx);
  Var logits = classifier_->forward(dropped, ctx);
  return {features, logits};
}

ParameterList AdcrnnModel::params() const {
  ParameterList out;
  conv_->collect("conv", &out);
  dilated1_->collect("dilated1", &out);
  dilated2_->collect("dilated2", &out);
  dilated3_->collect("dilated3", &out);
  skip_adapter_->collect("skip", &out);
  linear_->collect("linear", &out);
  bn_->collect("bn", &out);
  lstm_->collect("lstm", &out);
  out.push_back(attention_z_);
  fcn_->collect("fcn", &out);
  classifier_->collect("classifier", &out);
  return out;
}

std::vector<std::pair<std::string, Tensor*>> AdcrnnModel::state() const {
  std::vector<std::pair<std::string, Tensor*>> out;
  bn_->collect_state("bn", &out);
  return out;
}

std::vector<std::string> AdcrnnModel::op_names() const {
  return {"Conv2D",        "ReLU",     "MaxPool2D", "DilatedConv2D", "ReLU",
          "DilatedConv2D", "ReLU",     "DilatedConv2D", "SkipAdd",   "ReLU",
          "Dense",         "BatchNorm", "BiDilatedLSTM", "Attention", "Dense",
          "Dropout",       "Dense"};
}

Prediction predict_one(const AdcrnnModel& model, const Tensor& feature) {
  NoGradGuard no_grad(false);
  ForwardCtx ctx{false, nullptr};
  Shape shape = feature.shape();
  shape.insert(shape.begin(), 1);
  Var x = constant(feature.reshaped(shape));
  Var logits = model.forward(x, ctx).logits;
  Var probs = softmax(logits);

  Prediction p;
  p.probabilities = probs.value().a();
  for (Eigen::Index i = 1; i < p.probabilities.size(); ++i)
    if (p.probabilities[i] > p.probabilities[p.label]) p.label = static_cast<int>(i);
  return p;
}

std::vector<int> predict_batch(const AdcrnnModel& model, const std::vector<Tensor>& features,
                               Eigen::Index batch_size) {
  NoGradGuard no_grad(false);
  ForwardCtx ctx{false, nullptr};
  std::vector<int> out;
  out.reserve(features.size());

  for (std::size_t done = 0; done < features.size();) {
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(batch_size),
                                                features.size() - done);
    Shape shape = features[done].shape();
    shape.insert(shape.begin(), static_cast<Eigen::Index>(n));
    Tensor batch(shape);
    const Eigen::Index per = features[done].size();
    for (std::size_t i = 0; i < n; ++i) {
      if (features[done + i].size() != per) throw Error("predict: ragged feature batch");
      std::copy(features[done + i].data(), features[done + i].data() + per,
                batch.data() + static_cast<Eigen::Index>(i) * per);
    }
    Var logits = model.forward(constant(batch), ctx).logits;
    auto lm = logits.value().m2();
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      for (Eigen::Index j = 1; j < lm.cols(); ++j)
        if (lm(static_cast<Eigen::Index>(i), j) > lm(static_cast<Eigen::Index>(i), best))
          best = static_cast<int>(j);
      out.push_back(best);
    }
    done += n;
  }
  return out;
}

}  // namespace evf::adcrnn
