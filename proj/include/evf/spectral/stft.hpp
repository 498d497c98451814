// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <complex>

#include "evf/audio/waveform.hpp"

namespace evf::spectral {

using CRowMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct StftConfig {
  Eigen::Index window = 400;   // samples
  Eigen::Index hop = 160;      // samples
  Eigen::Index fft_size = 512;
  int sample_rate = 16000;

  Eigen::Index bins() const { return fft_size / 2 + 1; }

  void validate() const;

  // 25 ms windows, 10 ms hop, 512-point FFT at 16 kHz.
  static StftConfig features();
  // 16 ms windows, 8 ms hop at 16 kHz (256-sample window and FFT).
  static StftConfig specgan();
  // 2048-point frames with 512 hop, used by the phase vocoder.
  static StftConfig vocoder(int sample_rate);
};

// Frame t covers samples [t*hop, t*hop + window); no centering pad.
struct Spectrogram {
  CRowMat frames;  // T x bins
  StftConfig config;

  Eigen::Index num_frames() const { return frames.rows(); }
  RowMatD magnitude() const { return frames.cwiseAbs(); }
};

struct MagSpectrogram {
  RowMatD mag;  // T x bins, nonnegative
  StftConfig config;
};

// Periodic Hann window of the given length.
Eigen::ArrayXd hann_window(Eigen::Index n);

Spectrogram stft(const audio::Waveform& w, const StftConfig& cfg);

// Least-squares overlap-add inverse with the same Hann window; output length
// is (T-1)*hop + window. Rejects configs whose window overlap leaves interior
// gaps (hop > window / 2).
audio::Waveform istft(const Spectrogram& s);

// Griffin-Lim phase reconstruction from a magnitude target, starting at zero
// phase. `distances` (optional) receives ||mag - |stft(x_k)||_F for k = 0..iters.
audio::Waveform griffin_lim(const MagSpectrogram& target, int iters = 16,
                            std::vector<double>* distances = nullptr);

}  // namespace evf::spectral
