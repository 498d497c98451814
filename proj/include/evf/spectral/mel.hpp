// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "evf/spectral/stft.hpp"

namespace evf::spectral {

double hz_to_mel(double hz);
double mel_to_hz(double mel);

enum class FilterSpacing { kMel, kLinear };

// Triangular filterbank, rows ordered by center frequency. Band edges are
// spaced on the HTK mel scale by default (a linear-spacing switch is
// provided). Shape: nfilt x (fft_size/2 + 1).
RowMatD mel_filterbank(int nfilt = 40, double fmin = 300.0, double fmax = 8000.0,
                       Eigen::Index fft_size = 512, int sample_rate = 16000,
                       FilterSpacing spacing = FilterSpacing::kMel);

// Center frequencies (Hz) of each filter, for geometry checks.
Eigen::ArrayXd filter_centers_hz(int nfilt = 40, double fmin = 300.0, double fmax = 8000.0,
                                 FilterSpacing spacing = FilterSpacing::kMel);

}  // namespace evf::spectral
