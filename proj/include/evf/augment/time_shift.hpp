// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "evf/audio/waveform.hpp"

namespace evf::augment {

enum class ShiftDirection { kForward, kBackward };
enum class ShiftMode { kShift, kRoll };

struct ShiftSpec {
  std::optional<Eigen::Index> tau;  // unset: default sr/100
  ShiftDirection direction = ShiftDirection::kForward;
  ShiftMode mode = ShiftMode::kShift;

  Eigen::Index effective_tau(int sample_rate) const {
    return tau.has_value() ? *tau : sample_rate / 100;
  }
};

// Displaces the signal by tau samples. kShift zero-fills the vacated region
// and keeps the length; kRoll rotates circularly (tau must stay below the
// length).
audio::Waveform time_shift(const audio::Waveform& w, const ShiftSpec& spec);

}  // namespace evf::augment
