// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/audio/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace evf::audio {

const char* to_string(EmotionLabel label) { return kEmotionNames[static_cast<int>(label)]; }

EmotionLabel emotion_from_string(const std::string& name) {
  for (int i = 0; i < kNumEmotions; ++i)
    if (name == kEmotionNames[i]) return static_cast<EmotionLabel>(i);
  throw Error("unknown emotion label: " + name);
}

const char* to_string(Provenance p) {
  static constexpr std::array<const char*, 5> names = {"original", "time_shift", "pitch_shift",
                                                       "wavegan", "specgan"};
  return names[static_cast<int>(p)];
}

Provenance provenance_from_string(const std::string& name) {
  for (int i = 0; i < 5; ++i)
    if (name == to_string(static_cast<Provenance>(i))) return static_cast<Provenance>(i);
  throw Error("unknown provenance: " + name);
}

std::array<int, kNumEmotions> Catalog::class_counts() const {
  std::array<int, kNumEmotions> counts{};
  for (const auto& r : records) counts[static_cast<int>(r.label)]++;
  return counts;
}

UtteranceRecord decode_emodb_name(const std::string& filename, const std::string& path) {
  std::string stem = filename;
  if (auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  if (stem.size() < 6) throw EmodbNameError("name too short: " + filename);

  EmotionLabel label;
  switch (stem[5]) {
    case 'W': label = EmotionLabel::kAnger; break;
    case 'L': label = EmotionLabel::kBoredom; break;
    case 'E': label = EmotionLabel::kDisgust; break;
    case 'A': label = EmotionLabel::kFear; break;
    case 'F': label = EmotionLabel::kHappiness; break;
    case 'T': label = EmotionLabel::kSadness; break;
    case 'N': label = EmotionLabel::kNeutral; break;
    default: throw EmodbNameError("unrecognized emotion letter in: " + filename);
  }

  UtteranceRecord rec;
  rec.id = stem;
  rec.speaker = stem.substr(0, 2);
  rec.label = label;
  rec.path = path;
  rec.provenance = Provenance::kOriginal;
  return rec;
}

Catalog ingest_emodb(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);

  Catalog catalog;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.size() < 4 || name.substr(name.size() - 4) != ".wav") continue;
    try {
      catalog.records.push_back(decode_emodb_name(name, entry.path().string()));
    } catch (const EmodbNameError&) {
      catalog.skipped++;
    }
  }
  std::sort(catalog.records.begin(), catalog.records.end(),
            [](const UtteranceRecord& a, const UtteranceRecord& b) { return a.id < b.id; });
  return catalog;
}

void write_catalog_csv(const Catalog& catalog, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << "id,speaker,label,path,provenance\n";
  for (const auto& r : catalog.records)
    os << r.id << ',' << r.speaker << ',' << to_string(r.label) << ',' << r.path << ','
       << to_string(r.provenance) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

Catalog read_catalog_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open catalog: " + path);
  std::string line;
  if (!std::getline(is, line) || line != "id,speaker,label,path,provenance")
    throw Error("bad catalog header in " + path);

  Catalog catalog;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    UtteranceRecord r;
    std::getline(ss, r.id, ',');
    std::getline(ss, r.speaker, ',');
    std::getline(ss, field, ',');
    r.label = emotion_from_string(field);
    std::getline(ss, r.path, ',');
    std::getline(ss, field, ',');
    r.provenance = provenance_from_string(field);
    catalog.records.push_back(std::move(r));
  }
  return catalog;
}

}  // namespace evf::audio
