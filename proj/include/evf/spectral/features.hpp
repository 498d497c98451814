// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "evf/spectral/mel.hpp"
#include "evf/tensor.hpp"

namespace evf::spectral {

struct Mel3dConfig {
  StftConfig stft = StftConfig::features();
  int nfilt = 40;
  double fmin = 300.0;
  double fmax = 8000.0;
  FilterSpacing spacing = FilterSpacing::kMel;
  double log_floor = 1e-10;
  Eigen::Index fixed_frames = 300;  // ~3 s at the feature hop
  int delta_width = 2;
};

// log(melfb * |STFT|^2 + floor): T x nfilt.
RowMatD log_mel_static(const audio::Waveform& w, const Mel3dConfig& cfg = {});

// Regression delta over +-n frames with edge replication.
RowMatD delta(const RowMatD& x, int n = 2);

// Stacked (static, delta, delta-delta) without length normalization:
// (T, nfilt, 3).
Tensor melspec_3d_full(const audio::Waveform& w, const Mel3dConfig& cfg = {});

// Fixed-length variant: crops or zero-pads the time axis to
// cfg.fixed_frames. The crop window is centered unless an RNG is supplied
// (training-time random crop). Shape: (fixed_frames, nfilt, 3).
Tensor melspec_3d(const audio::Waveform& w, const Mel3dConfig& cfg = {}, Rng* crop_rng = nullptr);

// Crop/zero-pad a (T, nfilt, 3) tensor along time.
Tensor fit_frames(const Tensor& t, Eigen::Index frames, Rng* crop_rng = nullptr);

}  // namespace evf::spectral
