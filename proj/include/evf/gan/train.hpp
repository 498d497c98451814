// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "evf/audio/waveform.hpp"
#include "evf/gan/gan.hpp"

namespace evf::gan {

struct GanTrainConfig {
  Eigen::Index steps = 2000;      // critic updates
  Eigen::Index batch_size = 8;
  Eigen::Index n_critic = 5;      // critic updates per generator update
  double gp_lambda = 10.0;
  double lr = 1e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GanTrainResult {
  std::vector<double> loss_d;       // per critic step, penalty included
  std::vector<double> wasserstein;  // per critic step: mean D(real) - mean D(fake)
};

// Alternating WGAN-GP training over fixed-shape slices. Every randomness
// source derives from cfg.seed.
GanTrainResult train_gan(GanPair& pair, const std::vector<Tensor>& slices,
                         const GanTrainConfig& cfg);

// Deterministic sampling from the generator; one tensor of sample_shape per
// item.
std::vector<Tensor> generate_samples(const GanPair& pair, Eigen::Index count, std::uint64_t seed);

// Random fixed-length crops of class utterances as (len, C) slices;
// zero-padded when an utterance is shorter than the slice.
std::vector<Tensor> make_wave_slices(const std::vector<audio::Waveform>& utterances,
                                     Eigen::Index count, Eigen::Index slice_len, Rng& rng);

// Interprets a (16384, 1) generator output as a 16 kHz waveform.
audio::Waveform slice_to_waveform(const Tensor& t, int sample_rate = 16000);

void save_gan_checkpoint(const GanPair& pair, const GanTrainConfig& cfg, const std::string& dir);
GanPair load_gan_checkpoint(const std::string& dir);

}  // namespace evf::gan
