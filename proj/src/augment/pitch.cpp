// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/augment/pitch.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "evf/audio/resample.hpp"
#include "evf/spectral/stft.hpp"

namespace evf::augment {
namespace {

double princarg(double x) { return x - 2.0 * M_PI * std::round(x / (2.0 * M_PI)); }

audio::Waveform reflect_pad(const audio::Waveform& w, Eigen::Index pad) {
  const Eigen::Index n = w.samples.size();
  audio::Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(n + 2 * pad);
  for (Eigen::Index i = 0; i < out.samples.size(); ++i) {
    Eigen::Index u = i - pad;
    while (u < 0 || u >= n) {
      if (u < 0) u = -u;
      if (u >= n) u = 2 * n - 2 - u;
    }
    out.samples[i] = w.samples[u];
  }
  return out;
}

}  // namespace

double PitchSpec::stretch_ratio() const {
  if (nbins < 1) throw Error("pitch_shift: nbins must be >= 1");
  return std::pow(2.0, -nhs / static_cast<double>(nbins));
}

audio::Waveform time_stretch(const audio::Waveform& w, double ratio) {
  if (!(ratio >= 0.25 && ratio <= 4.0)) throw Error("time_stretch: ratio outside [0.25, 4]");
  const Eigen::Index in_len = w.samples.size();
  const Eigen::Index target_len = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(in_len) / ratio));
  if (in_len < 2) {
    audio::Waveform out = w;
    out.samples = Eigen::ArrayXd::Zero(target_len);
    return out;
  }

  spectral::StftConfig cfg = spectral::StftConfig::vocoder(w.sample_rate);
  const Eigen::Index pad = cfg.fft_size / 2;
  spectral::Spectrogram analysis = spectral::stft(reflect_pad(w, pad), cfg);
  const Eigen::Index t_total = analysis.num_frames();
  const Eigen::Index bins = cfg.bins();

  // Trim offsets in the stretched signal: the left pad maps to pad/ratio.
  const Eigen::Index start = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(pad) / ratio));
  const Eigen::Index needed = start + target_len;
  Eigen::Index out_frames = static_cast<Eigen::Index>(
      std::ceil(static_cast<double>(t_total) / ratio));
  // Guarantee overlap-add coverage of the trimmed region; clamped time steps
  // read into the reflection pad.
  while ((out_frames - 1) * cfg.hop + cfg.window < needed) ++out_frames;

  // Per-bin phase advance of one analysis hop.
  Eigen::ArrayXd hop_phase(bins);
  for (Eigen::Index b = 0; b < bins; ++b)
    hop_phase[b] = 2.0 * M_PI * static_cast<double>(cfg.hop) * static_cast<double>(b) /
                   static_cast<double>(cfg.fft_size);

  spectral::Spectrogram synth;
  synth.config = cfg;
  synth.frames.resize(out_frames, bins);

  Eigen::ArrayXd phase(bins);
  for (Eigen::Index b = 0; b < bins; ++b) phase[b] = std::arg(analysis.frames(0, b));

  for (Eigen::Index k = 0; k < out_frames; ++k) {
    const double ts = std::min(static_cast<double>(k) * ratio,
                               static_cast<double>(t_total - 1));
    const Eigen::Index t0 = static_cast<Eigen::Index>(ts);
    const double frac = ts - static_cast<double>(t0);
    const bool has_next = t0 + 1 < t_total;

    for (Eigen::Index b = 0; b < bins; ++b) {
      const double m0 = std::abs(analysis.frames(t0, b));
      const double m1 = has_next ? std::abs(analysis.frames(t0 + 1, b)) : m0;
      const double mag = (1.0 - frac) * m0 + frac * m1;
      synth.frames(k, b) = std::polar(mag, phase[b]);
    }
    // Advance by the instantaneous frequency measured between the two
    // analysis frames that bracket this time step.
    for (Eigen::Index b = 0; b < bins; ++b) {
      double dphi = 0.0;
      if (has_next)
        dphi = princarg(std::arg(analysis.frames(t0 + 1, b)) - std::arg(analysis.frames(t0, b)) -
                        hop_phase[b]);
      phase[b] += hop_phase[b] + dphi;
    }
  }

  audio::Waveform stretched = spectral::istft(synth);
  audio::Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples = stretched.samples.segment(start, target_len);
  return out;
}

audio::Waveform pitch_shift(const audio::Waveform& w, const PitchSpec& spec) {
  const double ratio = spec.stretch_ratio();
  if (spec.nhs == 0.0) return w;
  audio::Waveform stretched = time_stretch(w, ratio);
  // Reinterpret the stretched signal at a scaled rate and convert back; the
  // final resampling ratio is sr / (sr / ratio) = ratio.
  const int scaled_sr = static_cast<int>(std::lround(w.sample_rate / ratio));
  stretched.sample_rate = scaled_sr;
  audio::Waveform out = audio::resample(stretched, w.sample_rate);
  out.sample_rate = w.sample_rate;
  return out;
}

}  // namespace evf::augment
