// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "evf/audio/catalog.hpp"
#include "evf/augment/pitch.hpp"
#include "evf/augment/time_shift.hpp"

namespace evf::augment {

// One synthetic sample to create. GAN methods carry a latent seed instead of
// DSP parameters; the sampled source still anchors the item (fold binding).
struct PlanItem {
  std::string source_id;
  audio::Provenance method = audio::Provenance::kTimeShift;
  std::string output_id;
  ShiftSpec shift;          // time_shift items
  PitchSpec pitch;          // pitch_shift items
  std::uint64_t gan_seed = 0;  // wavegan/specgan items
};

struct BalancePlan {
  int target_count = 0;  // majority-class count
  audio::Provenance method = audio::Provenance::kTimeShift;
  std::vector<PlanItem> items;
};

// Plans enough synthetic items to raise every class to the majority count.
// Sources are drawn with replacement, deterministically from the seed. The
// majority class receives nothing.
BalancePlan plan_balance(const audio::Catalog& catalog, audio::Provenance method,
                         std::uint64_t seed);

// Executes the time-shift / pitch-shift items of a plan: writes one WAV per
// item under out_dir and returns the catalog extended with the new records.
audio::Catalog run_traditional_augment(const audio::Catalog& catalog, const BalancePlan& plan,
                                       const std::string& out_dir);

}  // namespace evf::augment
