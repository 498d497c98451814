// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "evf/spectral/stft.hpp"

namespace evf::spectral {

inline constexpr Eigen::Index kSpecganFrames = 128;
inline constexpr Eigen::Index kSpecganBins = 128;
inline constexpr Eigen::Index kSpecganSliceLen = 16384;
inline constexpr double kSpecganLogFloor = 1e-10;

// Per-frequency-bin statistics of log magnitudes over a training corpus.
struct SpecganNorm {
  Eigen::ArrayXd mean;  // kSpecganBins
  Eigen::ArrayXd std;   // kSpecganBins, strictly positive
};

// Log-magnitude spectrogram of the first 16384 samples: 127 analysis frames
// padded to 128, 128 bins (Nyquist dropped). Input must be 16 kHz and at
// least 16384 samples long.
RowMatD specgan_log_mag(const audio::Waveform& w);

// Corpus statistics for normalization; the padded frame is excluded.
SpecganNorm specgan_fit_norm(const std::vector<audio::Waveform>& corpus);

// Standardize per bin, clip to 3 sigma, rescale to [-1, 1]: 128 x 128.
RowMatD specgan_forward(const audio::Waveform& w, const SpecganNorm& norm);

// Invert the normalization and run Griffin-Lim (16 iterations) to recover a
// waveform of 16384 samples.
audio::Waveform specgan_inverse(const RowMatD& spec, const SpecganNorm& norm,
                                int griffin_lim_iters = 16);

void save_specgan_norm(const SpecganNorm& norm, const std::string& path);
SpecganNorm load_specgan_norm(const std::string& path);

}  // namespace evf::spectral
