// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "evf/nn/layers.hpp"

namespace evf::nn {

// One LSTM direction with recurrence step t -> t - dilation. Gate order is
// (input, forget, cell, output); the forget-gate bias starts at 1.
class LstmCell {
 public:
  LstmCell(Eigen::Index input_size, Eigen::Index units, Rng& rng);

  // x: (B, T, F) -> (B, T, units). `reverse` runs the recurrence from the
  // last step toward the first.
  Var run(const Var& x, Eigen::Index dilation, bool reverse) const;

  void collect(const std::string& prefix, ParameterList* out) const;

  Eigen::Index units() const { return units_; }

 private:
  Eigen::Index units_;
  std::shared_ptr<Parameter> wx_, wh_, b_;
};

// Stacked bidirectional LSTM; layer i uses dilations[i]. Each layer
// concatenates forward and backward hidden states, so the feature size is
// 2 * units after every layer.
class BiDilatedLstm : public Layer {
 public:
  BiDilatedLstm(Eigen::Index input_size, Eigen::Index units,
                std::vector<Eigen::Index> dilations, Rng& rng, bool bidirectional = true);

  Var forward(const Var& x, ForwardCtx& ctx) override;
  Shape output_shape(const Shape& in) const override;
  std::string op_name() const override { return bidirectional_ ? "BiDilatedLSTM" : "DilatedLSTM"; }
  void collect(const std::string& prefix, ParameterList* out) override;

  Eigen::Index output_features() const;

 private:
  Eigen::Index units_;
  bool bidirectional_;
  std::vector<Eigen::Index> dilations_;
  std::vector<LstmCell> forward_cells_;
  std::vector<LstmCell> backward_cells_;
};

}  // namespace evf::nn
