// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "evf/nn/lstm.hpp"

namespace evf::adcrnn {

struct AdcrnnConfig {
  int num_classes = 7;
  Eigen::Index input_frames = 300;
  Eigen::Index input_bands = 40;
  Eigen::Index input_channels = 3;
  Eigen::Index conv_maps = 128;     // first conv: 3x3, stride 1, valid
  Eigen::Index dilated_maps = 256;  // 3 dilated convs: 3x3, same, dilation 2
  Eigen::Index linear_units = 512;
  Eigen::Index lstm_units = 512;
  std::vector<Eigen::Index> lstm_dilations = {1, 2};
  bool plain_bilstm = false;  // replaces the dilation list with all-1s
  Eigen::Index fcn_units = 64;
  double dropout_keep = 0.5;

  void validate() const;

  // Small configuration for CPU tests: maps 8/16, 32 linear/lstm units,
  // 16 FCN units.
  static AdcrnnConfig toy(int num_classes = 7, Eigen::Index frames = 100);
};

// Convolutional-recurrent classifier: conv + maxpool, three dilated convs
// with an additive skip from the pooled features (1x1 adapter), per-step
// linear + the model's only batchnorm, a bidirectional dilated LSTM stack,
// attention pooling, the FCN bottleneck that feeds the center loss, the
// model's only dropout, and the class logits.
class AdcrnnModel {
 public:
  AdcrnnModel(const AdcrnnConfig& cfg, Rng& rng);

  struct Output {
    nn::Var features;  // (B, fcn_units), pre-dropout
    nn::Var logits;    // (B, num_classes)
  };

  Output forward(const nn::Var& x, nn::ForwardCtx& ctx) const;

  nn::ParameterList params() const;
  std::vector<std::pair<std::string, Tensor*>> state() const;
  const AdcrnnConfig& config() const { return cfg_; }

  // Op names in forward order, for structural checks.
  std::vector<std::string> op_names() const;

 private:
  AdcrnnConfig cfg_;
  std::unique_ptr<nn::Conv2dLayer> conv_;
  std::unique_ptr<nn::MaxPool2dLayer> pool_;
  std::unique_ptr<nn::Conv2dLayer> dilated1_, dilated2_, dilated3_;
  std::unique_ptr<nn::Conv2dLayer> skip_adapter_;  // 1x1, pooled maps -> dilated maps
  std::unique_ptr<nn::DenseLayer> linear_;
  std::unique_ptr<nn::BatchNormLayer> bn_;
  std::unique_ptr<nn::BiDilatedLstm> lstm_;
  std::shared_ptr<nn::Parameter> attention_z_;
  std::unique_ptr<nn::DenseLayer> fcn_;
  std::unique_ptr<nn::DropoutLayer> dropout_;
  std::unique_ptr<nn::DenseLayer> classifier_;
};

// Argmax prediction with probabilities; ties resolve to the lowest class
// index.
struct Prediction {
  int label = 0;
  Eigen::ArrayXd probabilities;
};

Prediction predict_one(const AdcrnnModel& model, const Tensor& feature);
std::vector<int> predict_batch(const AdcrnnModel& model, const std::vector<Tensor>& features,
                               Eigen::Index batch_size = 16);

}  // namespace evf::adcrnn
