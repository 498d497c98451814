// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/spectral/mel.hpp"

#include <cmath>

namespace evf::spectral {
namespace {

// nfilt + 2 band edges in Hz over [fmin, fmax].
Eigen::ArrayXd band_edges(int nfilt, double fmin, double fmax, FilterSpacing spacing) {
  Eigen::ArrayXd edges(nfilt + 2);
  if (spacing == FilterSpacing::kMel) {
    const double m_lo = hz_to_mel(fmin), m_hi = hz_to_mel(fmax);
    for (int i = 0; i < nfilt + 2; ++i)
      edges[i] = mel_to_hz(m_lo + (m_hi - m_lo) * i / static_cast<double>(nfilt + 1));
  } else {
    for (int i = 0; i < nfilt + 2; ++i)
      edges[i] = fmin + (fmax - fmin) * i / static_cast<double>(nfilt + 1);
  }
  return edges;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

RowMatD mel_filterbank(int nfilt, double fmin, double fmax, Eigen::Index fft_size,
                       int sample_rate, FilterSpacing spacing) {
  if (nfilt < 1) throw Error("mel_filterbank: nfilt must be >= 1");
  if (!(fmin >= 0.0 && fmin < fmax)) throw Error("mel_filterbank: need 0 <= fmin < fmax");
  if (fmax > sample_rate / 2.0) throw Error("mel_filterbank: fmax beyond Nyquist");

  const Eigen::Index bins = fft_size / 2 + 1;
  const Eigen::ArrayXd edges = band_edges(nfilt, fmin, fmax, spacing);

  RowMatD fb = RowMatD::Zero(nfilt, bins);
  const double hz_per_bin = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
  for (int m = 0; m < nfilt; ++m) {
    const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
    for (Eigen::Index k = 0; k < bins; ++k) {
      const double f = k * hz_per_bin;
      if (f <= lo || f >= hi) continue;
      fb(m, k) = f <= center ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
    }
  }
  return fb;
}

Eigen::ArrayXd filter_centers_hz(int nfilt, double fmin, double fmax, FilterSpacing spacing) {
  const Eigen::ArrayXd edges = band_edges(nfilt, fmin, fmax, spacing);
  return edges.segment(1, nfilt);
}

}  // namespace evf::spectral
