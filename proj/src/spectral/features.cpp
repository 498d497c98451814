// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/spectral/features.hpp"

#include <algorithm>

namespace evf::spectral {

RowMatD log_mel_static(const audio::Waveform& w, const Mel3dConfig& cfg) {
  Spectrogram s = stft(w, cfg.stft);
  RowMatD power = s.frames.cwiseAbs2();
  RowMatD fb = mel_filterbank(cfg.nfilt, cfg.fmin, cfg.fmax, cfg.stft.fft_size,
                              cfg.stft.sample_rate, cfg.spacing);
  RowMatD mel = power * fb.transpose();  // T x nfilt
  return (mel.array() + cfg.log_floor).log().matrix();
}

RowMatD delta(const RowMatD& x, int n) {
  if (n < 1) throw Error("delta: width must be >= 1");
  const Eigen::Index t_total = x.rows();
  double denom = 0.0;
  for (int k = 1; k <= n; ++k) denom += static_cast<double>(k) * k;
  denom *= 2.0;

  RowMatD out(t_total, x.cols());
  for (Eigen::Index t = 0; t < t_total; ++t) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.cols());
    for (int k = 1; k <= n; ++k) {
      const Eigen::Index ahead = std::min<Eigen::Index>(t + k, t_total - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(t - k, 0);
      acc += static_cast<double>(k) * (x.row(ahead) - x.row(behind));
    }
    out.row(t) = acc / denom;
  }
  return out;
}

Tensor melspec_3d_full(const audio::Waveform& w, const Mel3dConfig& cfg) {
  RowMatD s = log_mel_static(w, cfg);
  RowMatD d1 = delta(s, cfg.delta_width);
  RowMatD d2 = delta(d1, cfg.delta_width);

  const Eigen::Index t_total = s.rows(), bands = s.cols();
  Tensor out({t_total, bands, 3});
  for (Eigen::Index t = 0; t < t_total; ++t)
    for (Eigen::Index b = 0; b < bands; ++b) {
      out.at({t, b, 0}) = s(t, b);
      out.at({t, b, 1}) = d1(t, b);
      out.at({t, b, 2}) = d2(t, b);
    }
  return out;
}

Tensor fit_frames(const Tensor& t, Eigen::Index frames, Rng* crop_rng) {
  if (t.rank() != 3) throw Error("fit_frames: expected (T, bands, channels)");
  const Eigen::Index t_in = t.dim(0), bands = t.dim(1), ch = t.dim(2);
  Tensor out({frames, bands, ch});
  const Eigen::Index row = bands * ch;

  if (t_in >= frames) {
    Eigen::Index start = (t_in - frames) / 2;
    if (crop_rng && t_in > frames)
      start = crop_rng->uniform_int(0, t_in - frames);
    std::copy(t.data() + start * row, t.data() + (start + frames) * row, out.data());
  } else {
    const Eigen::Index before = (frames - t_in) / 2;
    std::copy(t.data(), t.data() + t_in * row, out.data() + before * row);
  }
  return out;
}

Tensor melspec_3d(const audio::Waveform& w, const Mel3dConfig& cfg, Rng* crop_rng) {
  return fit_frames(melspec_3d_full(w, cfg), cfg.fixed_frames, crop_rng);
}

}  // namespace evf::spectral
