// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/spectral/specgan_transform.hpp"

#include <cmath>

#include "evf/audio/tensor_file.hpp"

namespace evf::spectral {

RowMatD specgan_log_mag(const audio::Waveform& w) {
  if (w.sample_rate != 16000) throw Error("specgan: expected 16 kHz input");
  if (w.samples.size() < kSpecganSliceLen)
    throw Error("specgan: input shorter than " + std::to_string(kSpecganSliceLen) + " samples");

  audio::Waveform slice;
  slice.sample_rate = w.sample_rate;
  slice.samples = w.samples.head(kSpecganSliceLen);

  Spectrogram s = stft(slice, StftConfig::specgan());  // 127 frames x 129 bins
  RowMatD out = RowMatD::Constant(kSpecganFrames, kSpecganBins, std::log(kSpecganLogFloor));
  for (Eigen::Index t = 0; t < s.frames.rows(); ++t)
    for (Eigen::Index b = 0; b < kSpecganBins; ++b)
      out(t, b) = std::log(std::max(std::abs(s.frames(t, b)), kSpecganLogFloor));
  return out;
}

SpecganNorm specgan_fit_norm(const std::vector<audio::Waveform>& corpus) {
  if (corpus.empty()) throw Error("specgan: empty corpus");
  const Eigen::Index analysis_frames = kSpecganFrames - 1;  // padded row excluded

  SpecganNorm norm;
  norm.mean = Eigen::ArrayXd::Zero(kSpecganBins);
  norm.std = Eigen::ArrayXd::Zero(kSpecganBins);

  double count = 0.0;
  std::vector<RowMatD> mags;
  mags.reserve(corpus.size());
  for (const auto& w : corpus) {
    mags.push_back(specgan_log_mag(w));
    for (Eigen::Index t = 0; t < analysis_frames; ++t)
      norm.mean += mags.back().row(t).transpose().array();
    count += static_cast<double>(analysis_frames);
  }
  norm.mean /= count;

  for (const auto& m : mags)
    for (Eigen::Index t = 0; t < analysis_frames; ++t)
      norm.std += (m.row(t).transpose().array() - norm.mean).square();
  norm.std = (norm.std / count).sqrt().max(1e-8);  // keep every bin's std positive
  return norm;
}

RowMatD specgan_forward(const audio::Waveform& w, const SpecganNorm& norm) {
  RowMatD mag = specgan_log_mag(w);
  RowMatD out(kSpecganFrames, kSpecganBins);
  for (Eigen::Index t = 0; t < kSpecganFrames; ++t)
    for (Eigen::Index b = 0; b < kSpecganBins; ++b) {
      double v = (mag(t, b) - norm.mean[b]) / norm.std[b];
      out(t, b) = std::clamp(v, -3.0, 3.0) / 3.0;
    }
  return out;
}

audio::Waveform specgan_inverse(const RowMatD& spec, const SpecganNorm& norm,
                                int griffin_lim_iters) {
  if (spec.rows() != kSpecganFrames || spec.cols() != kSpecganBins)
    throw Error("specgan_inverse: expected 128x128 input");

  MagSpectrogram target;
  target.config = StftConfig::specgan();
  target.mag.resize(kSpecganFrames, target.config.bins());
  for (Eigen::Index t = 0; t < kSpecganFrames; ++t) {
    for (Eigen::Index b = 0; b < kSpecganBins; ++b) {
      double logmag = spec(t, b) * 3.0 * norm.std[b] + norm.mean[b];
      target.mag(t, b) = std::exp(logmag);
    }
    target.mag(t, kSpecganBins) = kSpecganLogFloor;  // dropped Nyquist bin
  }

  audio::Waveform out = griffin_lim(target, griffin_lim_iters);
  out.samples.conservativeResize(kSpecganSliceLen);
  return out;
}

void save_specgan_norm(const SpecganNorm& norm, const std::string& path) {
  Tensor t({2, kSpecganBins});
  for (Eigen::Index b = 0; b < kSpecganBins; ++b) {
    t.at({0, b}) = norm.mean[b];
    t.at({1, b}) = norm.std[b];
  }
  audio::tensor_write(t, path);
}

SpecganNorm load_specgan_norm(const std::string& path) {
  Tensor t = audio::tensor_read(path);
  if (t.shape() != Shape{2, kSpecganBins}) throw Error("bad specgan norm file: " + path);
  SpecganNorm norm;
  norm.mean.resize(kSpecganBins);
  norm.std.resize(kSpecganBins);
  for (Eigen::Index b = 0; b < kSpecganBins; ++b) {
    norm.mean[b] = t.at({0, b});
    norm.std[b] = t.at({1, b});
  }
  if ((norm.std <= 0.0).any()) throw Error("specgan norm: non-positive std in " + path);
  return norm;
}

}  // namespace evf::spectral
