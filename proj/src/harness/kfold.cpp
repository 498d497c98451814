// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/harness/kfold.hpp"

#include <array>

namespace evf::harness {

std::vector<FoldSplit> split_kfold(const audio::Catalog& catalog, int k, std::uint64_t seed,
                                   int* warnings) {
  if (k < 2) throw Error("split_kfold: k must be >= 2");

  std::array<std::vector<std::string>, audio::kNumEmotions> by_class;
  for (const auto& r : catalog.records)
    if (r.provenance == audio::Provenance::kOriginal)
      by_class[static_cast<int>(r.label)].push_back(r.id);

  Rng rng(seed);
  if (warnings) *warnings = 0;

  std::vector<std::vector<std::string>> fold_ids(static_cast<std::size_t>(k));
  int next_fold = 0;
  for (auto& ids : by_class) {
    if (ids.empty()) continue;
    if (static_cast<int>(ids.size()) < k && warnings) ++*warnings;
    rng.shuffle(ids);
    // Round-robin continues across classes so remainders spread evenly.
    for (const auto& id : ids) {
      fold_ids[static_cast<std::size_t>(next_fold)].push_back(id);
      next_fold = (next_fold + 1) % k;
    }
  }

  std::vector<FoldSplit> out(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    out[static_cast<std::size_t>(f)].fold = f;
    out[static_cast<std::size_t>(f)].test_ids = fold_ids[static_cast<std::size_t>(f)];
    for (int g = 0; g < k; ++g)
      if (g != f)
        out[static_cast<std::size_t>(f)].train_ids.insert(
            out[static_cast<std::size_t>(f)].train_ids.end(),
            fold_ids[static_cast<std::size_t>(g)].begin(),
            fold_ids[static_cast<std::size_t>(g)].end());
  }
  return out;
}

}  // namespace evf::harness
