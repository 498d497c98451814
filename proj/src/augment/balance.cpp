// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/augment/balance.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>

#include "evf/audio/wav.hpp"

namespace evf::augment {

namespace fs = std::filesystem;

BalancePlan plan_balance(const audio::Catalog& catalog, audio::Provenance method,
                         std::uint64_t seed) {
  if (method == audio::Provenance::kOriginal) throw Error("plan_balance: method required");
  if (catalog.records.empty()) throw Error("plan_balance: empty catalog");

  std::array<std::vector<const audio::UtteranceRecord*>, audio::kNumEmotions> by_class;
  for (const auto& r : catalog.records)
    if (r.provenance == audio::Provenance::kOriginal)
      by_class[static_cast<int>(r.label)].push_back(&r);

  int target = 0;
  for (const auto& cls : by_class) target = std::max(target, static_cast<int>(cls.size()));

  Rng rng(seed);
  BalancePlan plan;
  plan.target_count = target;
  plan.method = method;

  const char* tag = method == audio::Provenance::kTimeShift    ? "ts"
                    : method == audio::Provenance::kPitchShift ? "ps"
                    : method == audio::Provenance::kWavegan    ? "wg"
                                                               : "sg";
  int serial = 0;
  for (int c = 0; c < audio::kNumEmotions; ++c) {
    const auto& cls = by_class[c];
    if (cls.empty()) throw Error(std::string("plan_balance: class has no samples: ") +
                                 audio::kEmotionNames[c]);
    for (int need = target - static_cast<int>(cls.size()); need > 0; --need) {
      const audio::UtteranceRecord* src = rng.pick(cls);
      PlanItem item;
      item.source_id = src->id;
      item.method = method;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%s%04d", tag, serial++);
      item.output_id = src->id + "_" + buf;
      switch (method) {
        case audio::Provenance::kTimeShift:
          // tau in {1 .. sr/10} at the 16 kHz pipeline rate, roll mode,
          // direction uniform.
          item.shift.tau = rng.uniform_int(1, 1600);
          item.shift.mode = ShiftMode::kRoll;
          item.shift.direction =
              rng.uniform_int(0, 1) == 0 ? ShiftDirection::kForward : ShiftDirection::kBackward;
          break;
        case audio::Provenance::kPitchShift: {
          static constexpr int kSteps[4] = {-2, -1, 1, 2};
          item.pitch.nhs = kSteps[rng.uniform_int(0, 3)];
          break;
        }
        default:
          item.gan_seed = rng.next_u64();
          break;
      }
      plan.items.push_back(std::move(item));
    }
  }
  return plan;
}

audio::Catalog run_traditional_augment(const audio::Catalog& catalog, const BalancePlan& plan,
                                       const std::string& out_dir) {
  if (plan.method != audio::Provenance::kTimeShift &&
      plan.method != audio::Provenance::kPitchShift)
    throw Error("run_traditional_augment: plan is GAN-based");

  std::map<std::string, const audio::UtteranceRecord*> by_id;
  for (const auto& r : catalog.records) by_id[r.id] = &r;

  fs::create_directories(out_dir);
  audio::Catalog out = catalog;
  for (const auto& item : plan.items) {
    auto it = by_id.find(item.source_id);
    if (it == by_id.end()) throw Error("augment: unknown source id " + item.source_id);
    audio::Waveform w = audio::read_wav(it->second->path);

    audio::Waveform augmented;
    if (item.method == audio::Provenance::kTimeShift) {
      ShiftSpec spec = item.shift;
      // Planned at 16 kHz; rescale for other rates and keep roll valid.
      Eigen::Index tau = spec.tau.value_or(w.sample_rate / 100);
      if (w.sample_rate != 16000)
        tau = std::max<Eigen::Index>(1, tau * w.sample_rate / 16000);
      spec.tau = std::min<Eigen::Index>(tau, w.samples.size() - 1);
      augmented = time_shift(w, spec);
    } else {
      augmented = pitch_shift(w, item.pitch);
    }

    std::string path = (fs::path(out_dir) / (item.output_id + ".wav")).string();
    audio::write_wav(augmented, path);

    audio::UtteranceRecord rec;
    rec.id = item.output_id;
    rec.speaker = it->second->speaker;
    rec.label = it->second->label;
    rec.path = path;
    rec.provenance = item.method;
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace evf::augment
