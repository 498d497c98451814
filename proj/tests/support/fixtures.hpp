// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "evf/adcrnn/trainer.hpp"
#include "evf/audio/catalog.hpp"
#include "evf/audio/wav.hpp"
#include "evf/spectral/features.hpp"
#include "tests/support/oracles.hpp"

namespace evf::test {

// Published per-class counts of the corpus this pipeline targets (535 files,
// 10 speakers), in label order anger..neutral.
inline constexpr std::array<int, 7> kEmodbCounts = {127, 81, 46, 69, 71, 62, 79};
inline constexpr std::array<char, 7> kEmodbLetters = {'W', 'L', 'E', 'A', 'F', 'T', 'N'};
inline constexpr std::array<const char*, 10> kEmodbSpeakers = {"03", "08", "09", "10", "11",
                                                               "12", "13", "14", "15", "16"};

// Writes an EmoDB-named WAV tree. `counts` defaults to the full census;
// shrink it for fast structural tests. Per-class tones make the files
// classifiable.
inline void make_emodb_fixture(const std::string& dir, const std::array<int, 7>& counts = kEmodbCounts,
                               Eigen::Index samples_per_file = 1200) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  static constexpr std::array<double, 7> tone_hz = {400, 700, 1000, 1500, 2200, 3100, 4000};
  for (int c = 0; c < 7; ++c) {
    for (int i = 0; i < counts[static_cast<std::size_t>(c)]; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%s%c%02d%c%c.wav", kEmodbSpeakers[i % 10],
                    'a' + (i / 10) % 2, (i / 20) % 100, kEmodbLetters[static_cast<std::size_t>(c)],
                    'a' + i % 26);
      audio::Waveform w = sine(tone_hz[static_cast<std::size_t>(c)], 16000, samples_per_file, 0.4,
                               0.1 * i);
      audio::write_wav(w, (fs::path(dir) / name).string());
    }
  }
}

// Synthetic separable dataset: pure tones plus noise, one frequency per
// class.
inline adcrnn::FeatureSet make_tone_features(const std::vector<double>& class_hz, int per_class,
                                             const spectral::Mel3dConfig& cfg, std::uint64_t seed,
                                             double duration_s = 1.0) {
  adcrnn::FeatureSet set;
  Rng rng(seed);
  const Eigen::Index n = static_cast<Eigen::Index>(duration_s * 16000);
  for (std::size_t c = 0; c < class_hz.size(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      audio::Waveform w = sine(class_hz[c], 16000, n, rng.uniform(0.25, 0.6),
                               rng.uniform(0.0, 2.0 * M_PI));
      for (Eigen::Index t = 0; t < w.samples.size(); ++t)
        w.samples[t] += rng.uniform(-0.05, 0.05);
      set.features.push_back(spectral::melspec_3d(w, cfg));
      set.labels.push_back(static_cast<int>(c));
    }
  }
  return set;
}

inline std::string temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / ("evf_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

}  // namespace evf::test
