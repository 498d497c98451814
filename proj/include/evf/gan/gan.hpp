// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "evf/nn/layers.hpp"

namespace evf::gan {

enum class GanFamily { kWavegan, kSpecgan };

struct GanSpec {
  GanFamily family = GanFamily::kWavegan;
  Eigen::Index model_size = 64;  // D
  Eigen::Index channels = 1;     // C
  Eigen::Index latent_dim = 100;
  Eigen::Index phase_shuffle_n = 2;

  // (16384, C) audio slices or (128, 128, C) normalized spectrograms.
  Shape sample_shape() const;
};

struct GanPair {
  nn::Graph generator;
  nn::Graph discriminator;
  GanSpec spec;

  nn::ParameterList generator_params() const { return generator.params(); }
  nn::ParameterList discriminator_params() const { return discriminator.params(); }
};

// Generator: dense(100 -> 256D), reshape, five stride-4 transposed 1-D convs
// with ReLU between and tanh at the end. Discriminator mirrors it with
// LeakyReLU(0.2) and phase shuffle after the first four activations. No
// batchnorm anywhere.
GanPair build_wavegan(const GanSpec& spec, Rng& rng);

// 2-D analog with 5x5 kernels and stride 2; no phase shuffle.
GanPair build_specgan(const GanSpec& spec, Rng& rng);

GanPair build_gan(const GanSpec& spec, Rng& rng);

// Samples a latent batch z ~ Uniform(-1, 1): (batch, 100).
nn::Var sample_latent(const GanSpec& spec, Eigen::Index batch, Rng& rng);

struct WganGpLosses {
  nn::Var loss_d;
  nn::Var loss_g;
  double wasserstein = 0.0;  // mean D(real) - mean D(fake), no penalty
};

// loss_D = mean D(fake) - mean D(real) + lambda * mean((|grad D(xhat)| - 1)^2)
// with xhat = u*real + (1-u)*fake per example; loss_G = -mean D(fake).
// The penalty's parameter gradient flows through the recorded gradient graph.
WganGpLosses wgan_gp_losses(const nn::Graph& discriminator, const nn::Var& real,
                            const nn::Var& fake, double lambda, Rng& rng,
                            nn::ForwardCtx& ctx);

}  // namespace evf::gan
