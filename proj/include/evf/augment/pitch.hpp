// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "evf/audio/waveform.hpp"

namespace evf::augment {

struct PitchSpec {
  double nhs = 0.0;  // half steps, sign per the frequency law 2^(nhs/nbins)
  int nbins = 12;    // bins per octave

  double stretch_ratio() const;  // 2^(-nhs/nbins)
};

// Phase-vocoder time stretch (2048-point frames, 512 hop, Hann). ratio > 1
// shortens the signal (speeds it up); pitch content is preserved. Output
// length is round(len / ratio). Operating range: ratio in [0.25, 4].
audio::Waveform time_stretch(const audio::Waveform& w, double ratio);

// Stretch by 2^(-nhs/nbins), then resample back to the source rate so the
// length is preserved (within one sample) and the dominant frequency scales
// by 2^(nhs/nbins).
audio::Waveform pitch_shift(const audio::Waveform& w, const PitchSpec& spec);

}  // namespace evf::augment
