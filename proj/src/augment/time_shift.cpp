// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/augment/time_shift.hpp"

namespace evf::augment {

audio::Waveform time_shift(const audio::Waveform& w, const ShiftSpec& spec) {
  const Eigen::Index n = w.samples.size();
  Eigen::Index tau = spec.effective_tau(w.sample_rate);
  if (tau < 0) throw Error("time_shift: tau must be >= 0");
  if (spec.mode == ShiftMode::kRoll && tau >= n)
    throw Error("time_shift: roll requires tau < length");

  audio::Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples = Eigen::ArrayXd::Zero(n);

  // Forward displaces content toward later time; backward toward earlier.
  if (spec.mode == ShiftMode::kRoll) {
    const Eigen::Index r = spec.direction == ShiftDirection::kForward ? tau : n - tau;
    for (Eigen::Index t = 0; t < n; ++t) out.samples[(t + r) % n] = w.samples[t];
  } else {
    tau = std::min(tau, n);
    if (spec.direction == ShiftDirection::kForward) {
      for (Eigen::Index t = tau; t < n; ++t) out.samples[t] = w.samples[t - tau];
    } else {
      for (Eigen::Index t = 0; t < n - tau; ++t) out.samples[t] = w.samples[t + tau];
    }
  }
  return out;
}

}  // namespace evf::augment
