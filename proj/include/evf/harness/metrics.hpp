// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <vector>

#include "evf/common.hpp"

namespace evf::harness {

// Rows are ground truth, columns predictions.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  explicit ConfusionMatrix(int classes = 0) { counts = Eigen::MatrixXi::Zero(classes, classes); }

  void add(int truth, int pred);
  int total() const { return counts.sum(); }
  double accuracy() const;
  // Row-normalized diagonal; classes with no test items report 0.
  Eigen::ArrayXd per_class_accuracy() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          int classes);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by K)
};

Aggregate aggregate(const std::vector<double>& fold_accuracies);

}  // namespace evf::harness
