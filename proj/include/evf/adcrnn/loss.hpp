// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "evf/nn/ops.hpp"

namespace evf::adcrnn {

// Lf1: softmax + center loss on the FCN bottleneck features.
// Lf2: softmax alone.
// Lf3: softmax + center loss in logits space (one centroid per class logit).
// Lf4: softmax + contrastive-center loss on the bottleneck features.
enum class LossVariant { kLf1, kLf2, kLf3, kLf4 };

const char* to_string(LossVariant v);
LossVariant loss_variant_from_string(const std::string& name);

struct LossConfig {
  LossVariant variant = LossVariant::kLf1;
  double epsilon = 0.1;      // balance factor, in (0, 1)
  double center_rate = 0.5;  // centroid update rate
  double ctc_delta = 1.0;    // contrastive denominator offset
  bool centers_by_backprop = false;

  void validate() const;
  // Feature dimension the centroids live in for this variant.
  Eigen::Index centroid_dim(Eigen::Index fcn_units, Eigen::Index num_classes) const;
};

// Cross-entropy of softmax(logits), summed over the batch.
nn::Var softmax_loss(const nn::Var& logits, const std::vector<int>& labels);

// 1/2 sum_n ||x_n - C_{y_n}||^2.
nn::Var center_loss(const nn::Var& features, const std::vector<int>& labels,
                    const nn::Var& centroids);

// 1/2 sum_n ||x_n - C_{y_n}||^2 / (sum_{j != y_n} ||x_n - C_j||^2 + delta).
nn::Var contrastive_center_loss(const nn::Var& features, const std::vector<int>& labels,
                                const nn::Var& centroids, double delta);

// Classic center update:
// C_j <- C_j - alpha * sum_{n: y_n = j} (C_j - x_n) / (1 + count_j).
void update_centroids(Tensor& centroids, const Tensor& features, const std::vector<int>& labels,
                      double alpha);

// Assembles the configured variant. `centroids` must match
// centroid_dim(...) for the variant; it is ignored by Lf2.
nn::Var total_loss(const LossConfig& cfg, const nn::Var& features, const nn::Var& logits,
                   const std::vector<int>& labels, const nn::Var& centroids);

}  // namespace evf::adcrnn
