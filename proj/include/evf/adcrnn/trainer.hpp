// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "evf/adcrnn/loss.hpp"
#include "evf/adcrnn/model.hpp"

namespace evf::adcrnn {

struct FeatureSet {
  std::vector<Tensor> features;  // each (T, bands, channels)
  std::vector<int> labels;

  std::size_t size() const { return features.size(); }
};

struct TrainerConfig {
  LossConfig loss;
  int epochs = 50;
  Eigen::Index batch_size = 16;
  double lr = 1e-4;
  std::uint64_t seed = 1;
};

struct TrainResult {
  std::vector<double> step_loss;   // total loss per optimizer step
  std::vector<double> epoch_loss;  // mean per epoch
  Tensor centroids;                // final class centers
};

// Seeded mini-batch training: shuffle, forward in train mode, total loss,
// backward, Adam, then the classic centroid update (unless the config asks
// for backprop-learned centers).
TrainResult train_adcrnn(AdcrnnModel& model, const FeatureSet& train, const TrainerConfig& cfg);

double accuracy(const AdcrnnModel& model, const FeatureSet& set);

}  // namespace evf::adcrnn
