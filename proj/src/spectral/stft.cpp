// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/spectral/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <vector>

namespace evf::spectral {

void StftConfig::validate() const {
  if (window <= 0 || hop <= 0 || fft_size <= 0 || sample_rate <= 0)
    throw Error("stft: config fields must be positive");
  if (fft_size < window) throw Error("stft: fft_size must be >= window");
  if (hop > window) throw Error("stft: hop must be <= window");
}

StftConfig StftConfig::features() { return {400, 160, 512, 16000}; }

StftConfig StftConfig::specgan() { return {256, 128, 256, 16000}; }

StftConfig StftConfig::vocoder(int sample_rate) { return {2048, 512, 2048, sample_rate}; }

Eigen::ArrayXd hann_window(Eigen::Index n) {
  Eigen::ArrayXd w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

Spectrogram stft(const audio::Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  if (w.samples.size() < cfg.window) throw Error("stft: input shorter than one window");

  const Eigen::Index t_total = (w.samples.size() - cfg.window) / cfg.hop + 1;
  const Eigen::Index bins = cfg.bins();
  const Eigen::ArrayXd window = hann_window(cfg.window);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  Spectrogram out;
  out.config = cfg;
  out.frames.resize(t_total, bins);

  std::vector<double> frame(static_cast<std::size_t>(cfg.fft_size), 0.0);
  std::vector<std::complex<double>> spec;
  for (Eigen::Index t = 0; t < t_total; ++t) {
    for (Eigen::Index i = 0; i < cfg.window; ++i)
      frame[static_cast<std::size_t>(i)] = w.samples[t * cfg.hop + i] * window[i];
    std::fill(frame.begin() + cfg.window, frame.end(), 0.0);
    fft.fwd(spec, frame);
    for (Eigen::Index k = 0; k < bins; ++k) out.frames(t, k) = spec[static_cast<std::size_t>(k)];
  }
  return out;
}

audio::Waveform istft(const Spectrogram& s) {
  const StftConfig& cfg = s.config;
  cfg.validate();
  if (s.frames.cols() != cfg.bins()) throw Error("istft: bin count does not match config");
  // Hann needs at least 2x overlap to cover the interior without gaps.
  if (cfg.hop * 2 > cfg.window)
    throw Error("istft: window overlap insufficient for reconstruction (hop > window/2)");

  const Eigen::Index t_total = s.frames.rows();
  const Eigen::Index out_len = (t_total - 1) * cfg.hop + cfg.window;
  const Eigen::ArrayXd window = hann_window(cfg.window);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(out_len);
  Eigen::ArrayXd denom = Eigen::ArrayXd::Zero(out_len);

  std::vector<std::complex<double>> spec(static_cast<std::size_t>(cfg.bins()));
  std::vector<double> frame;
  for (Eigen::Index t = 0; t < t_total; ++t) {
    for (Eigen::Index k = 0; k < cfg.bins(); ++k) spec[static_cast<std::size_t>(k)] = s.frames(t, k);
    fft.inv(frame, spec, static_cast<int>(cfg.fft_size));
    for (Eigen::Index i = 0; i < cfg.window; ++i) {
      acc[t * cfg.hop + i] += window[i] * frame[static_cast<std::size_t>(i)];
      denom[t * cfg.hop + i] += window[i] * window[i];
    }
  }

  audio::Waveform out;
  out.sample_rate = cfg.sample_rate;
  out.samples.resize(out_len);
  for (Eigen::Index i = 0; i < out_len; ++i)
    // Samples no window reaches (the very edges of a Hann ramp) are
    // unconstrained; the minimum-norm solution leaves them at zero.
    out.samples[i] = denom[i] > 1e-12 ? acc[i] / denom[i] : 0.0;
  return out;
}

audio::Waveform griffin_lim(const MagSpectrogram& target, int iters,
                            std::vector<double>* distances) {
  const StftConfig& cfg = target.config;
  cfg.validate();
  if ((target.mag.array() < 0.0).any()) throw Error("griffin_lim: magnitudes must be nonnegative");
  if (distances) distances->clear();

  Spectrogram current;
  current.config = cfg;
  current.frames = target.mag.cast<std::complex<double>>();  // zero phase

  audio::Waveform x = istft(current);
  for (int k = 0; k < iters; ++k) {
    Spectrogram analyzed = stft(x, cfg);
    if (distances) distances->push_back((analyzed.magnitude() - target.mag).norm());
    // Keep the measured phase, impose the target magnitude.
    for (Eigen::Index t = 0; t < analyzed.frames.rows(); ++t)
      for (Eigen::Index b = 0; b < analyzed.frames.cols(); ++b) {
        std::complex<double> v = analyzed.frames(t, b);
        double m = std::abs(v);
        analyzed.frames(t, b) = m > 0.0 ? v / m * target.mag(t, b)
                                        : std::complex<double>(target.mag(t, b), 0.0);
      }
    x = istft(analyzed);
  }
  if (distances) {
    Spectrogram analyzed = stft(x, cfg);
    distances->push_back((analyzed.magnitude() - target.mag).norm());
  }
  return x;
}

}  // namespace evf::spectral
