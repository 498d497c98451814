// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <string>

#include "evf/adcrnn/loss.hpp"
#include "evf/harness/kfold.hpp"
#include "evf/harness/metrics.hpp"
#include "evf/tensor.hpp"

namespace evf::harness {

struct PipelineConfig {
  std::string dataset_dir;
  std::string out_dir;
  std::string hda_case = "none";  // none|time_shift|pitch_shift|wavegan|specgan
  adcrnn::LossConfig loss;
  int folds = 5;
  int epochs = 20;
  Eigen::Index batch_size = 16;
  double lr = 1e-4;
  std::uint64_t seed = 1;
  std::string scale = "toy";  // toy | full
  Eigen::Index fixed_frames = 300;

  // Desk-scale GAN settings for the GAN cases.
  Eigen::Index gan_steps = 500;
  Eigen::Index gan_batch = 8;
  Eigen::Index gan_n_critic = 5;
  Eigen::Index gan_model_size = 16;
  double gan_lr = 1e-4;
  Eigen::Index gan_slices_per_class = 64;

  // Plain-text key=value file; '#' starts a comment.
  static PipelineConfig from_file(const std::string& path);
  void validate() const;
  std::string case_title() const;
};

struct PipelineReport {
  std::string case_title;
  std::string loss_name;
  std::vector<ConfusionMatrix> fold_matrices;
  std::vector<double> fold_accuracies;
  ConfusionMatrix pooled;
  Aggregate agg;
  int augmented_added = 0;
};

struct FoldRunConfig {
  adcrnn::LossConfig loss;
  int folds = 5;
  int epochs = 20;
  Eigen::Index batch_size = 16;
  double lr = 1e-4;
  std::uint64_t seed = 1;
  std::string scale = "toy";
  Eigen::Index fixed_frames = 300;
  std::string checkpoint_dir;  // per-fold model checkpoints when set
};

// Supplies the feature tensor for an utterance; `crop_rng` is non-null for
// training-time use (seeded random crop), null for evaluation.
using FeatureProvider = std::function<Tensor(const std::string& id, Rng* crop_rng)>;

// Stratified k-fold training and evaluation over the catalog. Synthetic
// records never enter a test fold and train only in folds where their source
// utterance trains.
PipelineReport run_folds(const audio::Catalog& catalog, const FeatureProvider& features,
                         const FoldRunConfig& cfg);

// ingest -> split -> (augment) -> features -> per-fold train/eval -> report.
// Synthetic items join only training folds, bound to their source's fold.
// Writes catalog CSVs, feature tensors, report.json and report.txt under
// cfg.out_dir.
PipelineReport run_pipeline(const PipelineConfig& cfg);

void write_report_json(const PipelineReport& report, const PipelineConfig& cfg,
                       const std::string& path);
void write_report_text(const PipelineReport& report, const std::string& path);

}  // namespace evf::harness
