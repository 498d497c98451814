// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "evf/audio/waveform.hpp"

namespace evf::audio {

struct Catalog {
  std::vector<UtteranceRecord> records;
  int skipped = 0;  // files whose name could not be decoded

  std::array<int, kNumEmotions> class_counts() const;
};

struct EmodbNameError : Error {
  using Error::Error;
};

// Decodes an EmoDB-style file name: characters 1-2 are the speaker id,
// character 6 the German emotion letter (W/L/E/A/F/T/N). Throws
// EmodbNameError on anything else.
UtteranceRecord decode_emodb_name(const std::string& filename, const std::string& path);

// Scans a directory of EmoDB-named WAV files. Undecodable names are skipped
// and counted; records are sorted by id so ingestion order is stable.
Catalog ingest_emodb(const std::string& dir);

// CSV with header `id,speaker,label,path,provenance`.
void write_catalog_csv(const Catalog& catalog, const std::string& path);
Catalog read_catalog_csv(const std::string& path);

}  // namespace evf::audio
