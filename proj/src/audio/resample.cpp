// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/audio/resample.hpp"

#include <cmath>
#include <vector>

namespace evf::audio {
namespace {

constexpr double kBeta = 8.6;
constexpr double kZeroCrossings = 32.0;  // per side, at the filter's base rate
constexpr int kWindowTable = 4096;

// Kaiser window sampled over x in [0, 1], shared by all calls.
const std::vector<double>& kaiser_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kWindowTable + 1);
    const double denom = std::cyl_bessel_i(0.0, kBeta);
    for (int i = 0; i <= kWindowTable; ++i) {
      double x = static_cast<double>(i) / kWindowTable;
      t[i] = std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - x * x)) / denom;
    }
    return t;
  }();
  return table;
}

double kaiser(double x) {
  // |x| <= 1; linear interpolation of the table.
  const auto& table = kaiser_table();
  double pos = std::abs(x) * kWindowTable;
  int i = static_cast<int>(pos);
  if (i >= kWindowTable) return 0.0;
  double frac = pos - i;
  return table[i] + frac * (table[i + 1] - table[i]);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

Waveform resample(const Waveform& w, int target_sr) {
  if (target_sr <= 0) throw Error("resample: target_sr must be positive");
  if (w.sample_rate <= 0) throw Error("resample: source sample rate must be positive");
  if (target_sr == w.sample_rate) return w;

  const double ratio = static_cast<double>(target_sr) / w.sample_rate;
  const Eigen::Index in_len = w.samples.size();
  const Eigen::Index out_len =
      static_cast<Eigen::Index>(std::llround(static_cast<double>(in_len) * ratio));

  // Cutoff tracks the lower of the two Nyquist rates.
  const double fc = std::min(1.0, ratio);
  const double half_width = kZeroCrossings / fc;  // support in source samples

  Waveform out;
  out.sample_rate = target_sr;
  out.samples = Eigen::ArrayXd::Zero(out_len);

  for (Eigen::Index j = 0; j < out_len; ++j) {
    const double t = static_cast<double>(j) / ratio;  // center in source samples
    const Eigen::Index k_lo = std::max<Eigen::Index>(
        0, static_cast<Eigen::Index>(std::ceil(t - half_width)));
    const Eigen::Index k_hi = std::min<Eigen::Index>(
        in_len - 1, static_cast<Eigen::Index>(std::floor(t + half_width)));
    double acc = 0.0;
    for (Eigen::Index k = k_lo; k <= k_hi; ++k) {
      const double u = t - static_cast<double>(k);
      acc += w.samples[k] * sinc(fc * u) * kaiser(u / half_width);
    }
    out.samples[j] = fc * acc;
  }
  return out;
}

}  // namespace evf::audio
