// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "evf/audio/catalog.hpp"

namespace evf::harness {

struct FoldSplit {
  int fold = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Stratified, seeded k-fold over the catalog's original records. Synthetic
// records are excluded here; they inherit the fold of their source utterance
// downstream. `warnings` counts classes with fewer than k items.
std::vector<FoldSplit> split_kfold(const audio::Catalog& catalog, int k, std::uint64_t seed,
                                   int* warnings = nullptr);

}  // namespace evf::harness
