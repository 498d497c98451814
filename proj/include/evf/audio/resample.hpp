// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "evf/audio/waveform.hpp"

namespace evf::audio {

// Band-limited rate conversion with a Kaiser-windowed sinc kernel
// (beta 8.6, 32 zero crossings per side). Output length is
// round(len * target_sr / source_sr); identical input is returned when the
// rates already match.
Waveform resample(const Waveform& w, int target_sr);

}  // namespace evf::audio
