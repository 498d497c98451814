// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <string>

#include "evf/common.hpp"

namespace evf::audio {

// Mono audio, nominal amplitude range [-1, 1].
struct Waveform {
  Eigen::ArrayXd samples;
  int sample_rate = 0;

  Eigen::Index length() const { return samples.size(); }
  double duration_seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
};

enum class EmotionLabel : int {
  kAnger = 0,
  kBoredom,
  kDisgust,
  kFear,
  kHappiness,
  kSadness,
  kNeutral,
};

inline constexpr int kNumEmotions = 7;

inline constexpr std::array<const char*, kNumEmotions> kEmotionNames = {
    "anger", "boredom", "disgust", "fear", "happiness", "sadness", "neutral"};

// Two-letter display codes used in confusion-matrix headers.
inline constexpr std::array<const char*, kNumEmotions> kEmotionShortNames = {
    "An", "Bo", "Di", "Fe", "Ha", "Sa", "Ne"};

const char* to_string(EmotionLabel label);
EmotionLabel emotion_from_string(const std::string& name);

enum class Provenance : int {
  kOriginal = 0,
  kTimeShift,
  kPitchShift,
  kWavegan,
  kSpecgan,
};

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& name);

struct UtteranceRecord {
  std::string id;
  std::string speaker;
  EmotionLabel label = EmotionLabel::kAnger;
  std::string path;
  Provenance provenance = Provenance::kOriginal;
};

}  // namespace evf::audio
