// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/harness/metrics.hpp"

#include <cmath>

namespace evf::harness {

void ConfusionMatrix::add(int truth, int pred) {
  if (truth < 0 || truth >= counts.rows() || pred < 0 || pred >= counts.cols())
    throw Error("confusion: label out of range");
  counts(truth, pred)++;
}

double ConfusionMatrix::accuracy() const {
  const int n = total();
  if (n == 0) throw Error("confusion: empty matrix");
  return static_cast<double>(counts.trace()) / static_cast<double>(n);
}

Eigen::ArrayXd ConfusionMatrix::per_class_accuracy() const {
  Eigen::ArrayXd out(counts.rows());
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    const int row_sum = counts.row(r).sum();
    out[r] = row_sum > 0 ? static_cast<double>(counts(r, r)) / row_sum : 0.0;
  }
  return out;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  if (counts.rows() != o.counts.rows()) throw Error("confusion: size mismatch");
  counts += o.counts;
  return *this;
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                          int classes) {
  if (y_true.size() != y_pred.size()) throw Error("confusion: length mismatch");
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) m.add(y_true[i], y_pred[i]);
  return m;
}

Aggregate aggregate(const std::vector<double>& fold_accuracies) {
  if (fold_accuracies.empty()) throw Error("aggregate: no folds");
  Aggregate a;
  for (double v : fold_accuracies) a.mean += v;
  a.mean /= static_cast<double>(fold_accuracies.size());
  double ss = 0.0;
  for (double v : fold_accuracies) ss += (v - a.mean) * (v - a.mean);
  a.stddev = std::sqrt(ss / static_cast<double>(fold_accuracies.size()));
  return a;
}

}  // namespace evf::harness
