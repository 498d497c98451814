// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "evf/augment/balance.hpp"
#include "tests/support/fixtures.hpp"
#include "tests/support/oracles.hpp"

using namespace evf;
using test::sine;

TEST_CASE("time_shift: explicit tau 0 is the identity") {
  audio::Waveform w = sine(440, 16000, 400);
  augment::ShiftSpec spec;
  spec.tau = 0;
  audio::Waveform out = augment::time_shift(w, spec);
  CHECK((out.samples == w.samples).all());
}

TEST_CASE("time_shift: default tau is sr/100") {
  audio::Waveform w = sine(440, 16000, 1000);
  augment::ShiftSpec spec;  // tau unset
  spec.mode = augment::ShiftMode::kShift;
  audio::Waveform out = augment::time_shift(w, spec);
  for (Eigen::Index t = 0; t < 160; ++t) CHECK(out.samples[t] == 0.0);
  for (Eigen::Index t = 160; t < 1000; ++t) CHECK(out.samples[t] == w.samples[t - 160]);
}

TEST_CASE("time_shift: roll semantics and inverses") {
  audio::Waveform w;
  w.sample_rate = 4;
  w.samples.resize(4);
  w.samples << 1, 2, 3, 4;

  augment::ShiftSpec fwd;
  fwd.tau = 1;
  fwd.mode = augment::ShiftMode::kRoll;
  audio::Waveform r = augment::time_shift(w, fwd);
  CHECK(r.samples[0] == 4);
  CHECK(r.samples[1] == 1);
  CHECK(r.samples[2] == 2);
  CHECK(r.samples[3] == 3);

  // Composing rolls up to the full length returns the input.
  augment::ShiftSpec rest;
  rest.tau = 3;
  rest.mode = augment::ShiftMode::kRoll;
  audio::Waveform full = augment::time_shift(r, rest);
  CHECK((full.samples == w.samples).all());

  augment::ShiftSpec too_far;
  too_far.tau = 4;
  too_far.mode = augment::ShiftMode::kRoll;
  CHECK_THROWS(augment::time_shift(w, too_far));
}

TEST_CASE("time_shift: roll preserves the sample multiset, shift loses only energy") {
  Rng rng(9);
  audio::Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(300);
  for (Eigen::Index i = 0; i < 300; ++i) w.samples[i] = rng.uniform(-1, 1);

  augment::ShiftSpec roll;
  roll.tau = 37;
  roll.mode = augment::ShiftMode::kRoll;
  roll.direction = augment::ShiftDirection::kBackward;
  audio::Waveform rolled = augment::time_shift(w, roll);
  std::vector<double> a(w.samples.data(), w.samples.data() + 300);
  std::vector<double> b(rolled.samples.data(), rolled.samples.data() + 300);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);

  augment::ShiftSpec shift;
  shift.tau = 37;
  shift.mode = augment::ShiftMode::kShift;
  audio::Waveform shifted = augment::time_shift(w, shift);
  CHECK(shifted.samples.square().sum() <= w.samples.square().sum());
  for (Eigen::Index t = 37; t < 300; ++t) CHECK(shifted.samples[t] == w.samples[t - 37]);
}

TEST_CASE("time_stretch: identity ratio keeps length and content") {
  audio::Waveform w = sine(440, 16000, 16000);
  audio::Waveform out = augment::time_stretch(w, 1.0);
  CHECK(out.samples.size() == 16000);
  CHECK(test::snr_db(w.samples, out.samples, 0, 16000) >= 30.0);
}

TEST_CASE("time_stretch: ratio 2 halves the duration") {
  audio::Waveform out = augment::time_stretch(sine(440, 16000, 16000), 2.0);
  CHECK(out.samples.size() == 8000);
}

TEST_CASE("time_stretch: ratio 0.5 doubles duration and keeps the pitch") {
  audio::Waveform out = augment::time_stretch(sine(440, 16000, 16000), 0.5);
  CHECK(out.samples.size() == 32000);
  CHECK(test::fft_peak_hz(out) == doctest::Approx(440.0).epsilon(0.03));
}

TEST_CASE("time_stretch: rejects ratios outside the operating range") {
  audio::Waveform w = sine(440, 16000, 4000);
  CHECK_THROWS(augment::time_stretch(w, 0.2));
  CHECK_THROWS(augment::time_stretch(w, 5.0));
}

TEST_CASE("pitch_shift: stretch ratio follows the half-step law") {
  augment::PitchSpec spec;
  spec.nhs = 12;
  spec.nbins = 12;
  CHECK(spec.stretch_ratio() == 0.5);
  spec.nhs = -12;
  CHECK(spec.stretch_ratio() == 2.0);
  spec.nhs = 0;
  CHECK(spec.stretch_ratio() == 1.0);
}

TEST_CASE("pitch_shift: zero half-steps is the identity") {
  audio::Waveform w = sine(440, 16000, 8000);
  audio::Waveform out = augment::pitch_shift(w, {});
  CHECK(test::snr_db(w.samples, out.samples, 0, 8000) >= 30.0);
}

TEST_CASE("pitch_shift: one octave up doubles the peak and keeps the length") {
  audio::Waveform w = sine(440, 16000, 16000);
  augment::PitchSpec spec;
  spec.nhs = 12;
  audio::Waveform out = augment::pitch_shift(w, spec);
  CHECK(std::abs(out.samples.size() - w.samples.size()) <= 1);
  CHECK(test::fft_peak_hz(out) == doctest::Approx(880.0).epsilon(0.03));
}

TEST_CASE("pitch_shift: frequency law and length preservation across half-steps") {
  audio::Waveform w = sine(440, 16000, 12000);
  for (int nhs = -4; nhs <= 4; ++nhs) {
    if (nhs == 0) continue;
    augment::PitchSpec spec;
    spec.nhs = nhs;
    audio::Waveform out = augment::pitch_shift(w, spec);
    CHECK(std::abs(out.samples.size() - w.samples.size()) <= 1);
    const double expected = 440.0 * std::pow(2.0, nhs / 12.0);
    const double measured = test::fft_peak_hz(out);
    CHECK(measured >= expected * 0.97);
    CHECK(measured <= expected * 1.03);
  }
}

TEST_CASE("plan_balance: balanced catalogs need nothing") {
  const std::string dir = test::temp_dir("balance_even");
  test::make_emodb_fixture(dir, {3, 3, 3, 3, 3, 3, 3});
  audio::Catalog catalog = audio::ingest_emodb(dir);
  augment::BalancePlan plan = augment::plan_balance(catalog, audio::Provenance::kTimeShift, 5);
  CHECK(plan.items.empty());
  CHECK(plan.target_count == 3);
}

TEST_CASE("plan_balance: raises every class to the majority count") {
  const std::string dir = test::temp_dir("balance_census");
  test::make_emodb_fixture(dir);
  audio::Catalog catalog = audio::ingest_emodb(dir);
  augment::BalancePlan plan = augment::plan_balance(catalog, audio::Provenance::kPitchShift, 5);

  CHECK(plan.target_count == 127);
  CHECK(plan.items.size() == 7 * 127 - 535);

  // No synthetic item may source from the majority class.
  std::map<std::string, audio::EmotionLabel> label_of;
  for (const auto& r : catalog.records) label_of[r.id] = r.label;
  std::array<int, 7> added{};
  for (const auto& item : plan.items)
    added[static_cast<std::size_t>(label_of.at(item.source_id))]++;
  CHECK(added[0] == 0);  // anger untouched
  for (int c = 1; c < 7; ++c)
    CHECK(added[static_cast<std::size_t>(c)] ==
          127 - test::kEmodbCounts[static_cast<std::size_t>(c)]);
}

TEST_CASE("plan_balance: deterministic in the seed") {
  const std::string dir = test::temp_dir("balance_seed");
  test::make_emodb_fixture(dir, {6, 2, 3, 4, 2, 5, 1});
  audio::Catalog catalog = audio::ingest_emodb(dir);

  augment::BalancePlan a = augment::plan_balance(catalog, audio::Provenance::kTimeShift, 42);
  augment::BalancePlan b = augment::plan_balance(catalog, audio::Provenance::kTimeShift, 42);
  augment::BalancePlan c = augment::plan_balance(catalog, audio::Provenance::kTimeShift, 43);

  REQUIRE(a.items.size() == b.items.size());
  bool identical = true, differs_from_c = a.items.size() != c.items.size();
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    identical &= a.items[i].source_id == b.items[i].source_id &&
                 a.items[i].output_id == b.items[i].output_id &&
                 a.items[i].shift.tau == b.items[i].shift.tau &&
                 a.items[i].shift.direction == b.items[i].shift.direction;
    if (!differs_from_c)
      differs_from_c = a.items[i].source_id != c.items[i].source_id ||
                       a.items[i].shift.tau != c.items[i].shift.tau;
  }
  CHECK(identical);
  CHECK(differs_from_c);
}

TEST_CASE("run_traditional_augment: emits playable files and a balanced catalog") {
  const std::string dir = test::temp_dir("balance_run");
  test::make_emodb_fixture(dir, {4, 2, 2, 2, 2, 2, 2}, 2400);
  audio::Catalog catalog = audio::ingest_emodb(dir);
  augment::BalancePlan plan = augment::plan_balance(catalog, audio::Provenance::kTimeShift, 3);
  audio::Catalog out = augment::run_traditional_augment(catalog, plan, dir + "/aug");

  auto counts = out.class_counts();
  for (int c = 0; c < 7; ++c) CHECK(counts[static_cast<std::size_t>(c)] == 4);
  for (const auto& r : out.records)
    if (r.provenance != audio::Provenance::kOriginal) {
      audio::Waveform w = audio::read_wav(r.path);
      CHECK(w.samples.size() == 2400);
    }
}
