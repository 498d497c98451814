// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/adcrnn/trainer.hpp"

#include <numeric>

#include "evf/nn/adam.hpp"

namespace evf::adcrnn {

using namespace nn;

namespace {

Tensor stack_features(const FeatureSet& set, const std::vector<std::size_t>& pick) {
  Shape shape = set.features[pick[0]].shape();
  shape.insert(shape.begin(), static_cast<Eigen::Index>(pick.size()));
  Tensor out(shape);
  const Eigen::Index per = set.features[pick[0]].size();
  for (std::size_t i = 0; i < pick.size(); ++i) {
    const Tensor& f = set.features[pick[i]];
    if (f.size() != per) throw Error("train: ragged feature batch");
    std::copy(f.data(), f.data() + per, out.data() + static_cast<Eigen::Index>(i) * per);
  }
  return out;
}

}  // namespace

TrainResult train_adcrnn(AdcrnnModel& model, const FeatureSet& train, const TrainerConfig& cfg) {
  if (train.size() == 0) throw Error("train: empty training set");
  if (train.labels.size() != train.features.size())
    throw Error("train: label count mismatch");
  cfg.loss.validate();

  const AdcrnnConfig& mc = model.config();
  const Eigen::Index cdim = cfg.loss.centroid_dim(mc.fcn_units, mc.num_classes);

  Rng rng(cfg.seed);
  ForwardCtx train_ctx{true, &rng};

  ParameterList params = model.params();
  auto centroid_param = std::make_shared<Parameter>(
      "centroids", Tensor::zeros({mc.num_classes, cdim}));
  const bool learn_centers =
      cfg.loss.centers_by_backprop && cfg.loss.variant != LossVariant::kLf2;
  if (learn_centers) params.push_back(centroid_param);

  Adam opt(params, cfg.lr);

  TrainResult result;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_sum = 0.0;
    int steps = 0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min<std::size_t>(cfg.batch_size, order.size() - start);
      std::vector<std::size_t> pick(order.begin() + start, order.begin() + start + n);
      std::vector<int> labels(n);
      for (std::size_t i = 0; i < n; ++i) labels[i] = train.labels[pick[i]];

      Var x = constant(stack_features(train, pick));
      AdcrnnModel::Output out = model.forward(x, train_ctx);
      Var loss = total_loss(cfg.loss, out.features, out.logits, labels, centroid_param->var);

      backward(loss, params);
      opt.step();
      if (!learn_centers && cfg.loss.variant != LossVariant::kLf2) {
        const Var& feats = cfg.loss.variant == LossVariant::kLf3 ? out.logits : out.features;
        update_centroids(centroid_param->tensor(), feats.value(), labels, cfg.loss.center_rate);
      }

      result.step_loss.push_back(loss.value()[0]);
      epoch_sum += loss.value()[0];
      ++steps;
    }
    result.epoch_loss.push_back(epoch_sum / std::max(steps, 1));
  }

  result.centroids = centroid_param->tensor();
  return result;
}

double accuracy(const AdcrnnModel& model, const FeatureSet& set) {
  if (set.size() == 0) throw Error("accuracy: empty set");
  std::vector<int> preds = predict_batch(model, set.features);
  int correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == set.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace evf::adcrnn
