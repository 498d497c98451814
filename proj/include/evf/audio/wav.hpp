// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "evf/audio/waveform.hpp"

namespace evf::audio {

struct MalformedWavError : Error {
  using Error::Error;
};

// Non-PCM payloads, multichannel files or bit depths other than 16.
struct UnsupportedWavError : Error {
  using Error::Error;
};

// Reads a RIFF/WAVE file. Accepts PCM 16-bit mono only; samples are scaled by
// 1/32768 so that the int16 range maps into [-1, 1).
Waveform read_wav(const std::string& path);

// Writes PCM 16-bit mono. Samples outside [-1, 1] are clamped before
// quantization.
void write_wav(const Waveform& w, const std::string& path);

}  // namespace evf::audio
