// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/adcrnn/loss.hpp"

namespace evf::adcrnn {

using namespace nn;

const char* to_string(LossVariant v) {
  switch (v) {
    case LossVariant::kLf1: return "lf1";
    case LossVariant::kLf2: return "lf2";
    case LossVariant::kLf3: return "lf3";
    default: return "lf4";
  }
}

LossVariant loss_variant_from_string(const std::string& name) {
  if (name == "lf1") return LossVariant::kLf1;
  if (name == "lf2") return LossVariant::kLf2;
  if (name == "lf3") return LossVariant::kLf3;
  if (name == "lf4") return LossVariant::kLf4;
  throw Error("unknown loss variant: " + name);
}

void LossConfig::validate() const {
  if (epsilon < 0.0 || epsilon >= 1.0) throw Error("loss: epsilon must lie in [0, 1)");
  if (center_rate < 0.0) throw Error("loss: center rate must be >= 0");
}

Eigen::Index LossConfig::centroid_dim(Eigen::Index fcn_units, Eigen::Index num_classes) const {
  return variant == LossVariant::kLf3 ? num_classes : fcn_units;
}

namespace {

void check_labels(const std::vector<int>& labels, Eigen::Index batch, Eigen::Index classes) {
  if (static_cast<Eigen::Index>(labels.size()) != batch)
    throw Error("loss: one label per example required");
  for (int y : labels)
    if (y < 0 || y >= classes) throw Error("loss: label out of range");
}

// Rows of `centroids` selected by label: (B, F).
Var own_centroids(const Var& centroids, const std::vector<int>& labels) {
  const Eigen::Index f = centroids.value().dim(1);
  auto idx = std::make_shared<std::vector<Eigen::Index>>();
  idx->reserve(labels.size() * static_cast<std::size_t>(f));
  for (int y : labels)
    for (Eigen::Index i = 0; i < f; ++i) idx->push_back(y * f + i);
  return gather_flat(centroids, idx, {static_cast<Eigen::Index>(labels.size()), f});
}

}  // namespace

Var softmax_loss(const Var& logits, const std::vector<int>& labels) {
  const Eigen::Index b = logits.value().dim(0), e = logits.value().dim(1);
  check_labels(labels, b, e);

  // Stabilized log-sum-exp; the row max is a constant shift.
  Tensor mx(Shape{b});
  auto lm = logits.value().m2();
  for (Eigen::Index r = 0; r < b; ++r) mx[r] = lm.row(r).maxCoeff();
  Var z = sub(logits, expand(constant(mx), 1, e));
  Var lse = log_v(sum_axis(exp_v(z), 1));

  auto idx = std::make_shared<std::vector<Eigen::Index>>();
  idx->reserve(labels.size());
  for (Eigen::Index n = 0; n < b; ++n) idx->push_back(n * e + labels[static_cast<std::size_t>(n)]);
  Var picked = gather_flat(z, idx, {b});
  return sum_all(sub(lse, picked));
}

Var center_loss(const Var& features, const std::vector<int>& labels, const Var& centroids) {
  const Eigen::Index b = features.value().dim(0);
  check_labels(labels, b, centroids.value().dim(0));
  if (features.value().dim(1) != centroids.value().dim(1))
    throw Error("center_loss: feature dimension mismatch");
  Var d = sub(features, own_centroids(centroids, labels));
  return scale(sum_all(mul(d, d)), 0.5);
}

Var contrastive_center_loss(const Var& features, const std::vector<int>& labels,
                            const Var& centroids, double delta) {
  const Eigen::Index b = features.value().dim(0), e = centroids.value().dim(0);
  const Eigen::Index f = centroids.value().dim(1);
  check_labels(labels, b, e);
  if (features.value().dim(1) != f) throw Error("ctc_loss: feature dimension mismatch");

  // Pairwise squared distances: ||x||^2 - 2 x.C_j + ||C_j||^2, (B, E).
  Var xx = sum_axis(mul(features, features), 1);
  Var cc = sum_axis(mul(centroids, centroids), 1);
  Var cross = matmul(features, transpose2d(centroids));
  Var d2 = add(sub(expand(xx, 1, e), scale(cross, 2.0)), expand(cc, 0, b));

  auto idx = std::make_shared<std::vector<Eigen::Index>>();
  idx->reserve(labels.size());
  for (Eigen::Index n = 0; n < b; ++n) idx->push_back(n * e + labels[static_cast<std::size_t>(n)]);
  Var own = gather_flat(d2, idx, {b});
  Var others = add_scalar(sub(sum_axis(d2, 1), own), delta);
  return scale(sum_all(div(own, others)), 0.5);
}

void update_centroids(Tensor& centroids, const Tensor& features, const std::vector<int>& labels,
                      double alpha) {
  const Eigen::Index e = centroids.dim(0), f = centroids.dim(1);
  const Eigen::Index b = features.dim(0);
  check_labels(labels, b, e);
  if (features.dim(1) != f) throw Error("update_centroids: feature dimension mismatch");
  if (alpha == 0.0) return;

  Tensor delta_sum({e, f});
  std::vector<double> counts(static_cast<std::size_t>(e), 0.0);
  for (Eigen::Index n = 0; n < b; ++n) {
    const int y = labels[static_cast<std::size_t>(n)];
    counts[static_cast<std::size_t>(y)] += 1.0;
    for (Eigen::Index i = 0; i < f; ++i)
      delta_sum.at({y, i}) += centroids.at({y, i}) - features.at({n, i});
  }
  for (Eigen::Index j = 0; j < e; ++j) {
    const double denom = 1.0 + counts[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < f; ++i)
      centroids.at({j, i}) -= alpha * delta_sum.at({j, i}) / denom;
  }
}

Var total_loss(const LossConfig& cfg, const Var& features, const Var& logits,
               const std::vector<int>& labels, const Var& centroids) {
  cfg.validate();
  Var sm = softmax_loss(logits, labels);
  switch (cfg.variant) {
    case LossVariant::kLf2:
      return sm;
    case LossVariant::kLf1:
      if (cfg.epsilon == 0.0) return sm;
      return add(scale(center_loss(features, labels, centroids), cfg.epsilon), sm);
    case LossVariant::kLf3:
      if (cfg.epsilon == 0.0) return sm;
      return add(scale(center_loss(logits, labels, centroids), cfg.epsilon), sm);
    default:
      if (cfg.epsilon == 0.0) return sm;
      return add(scale(contrastive_center_loss(features, labels, centroids, cfg.ctc_delta),
                       cfg.epsilon),
                 sm);
  }
}

}  // namespace evf::adcrnn
