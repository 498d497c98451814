// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/nn/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "evf/audio/tensor_file.hpp"

namespace evf::nn {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void save_checkpoint(const std::string& dir, const std::string& model_kind,
                     const std::string& config_json, const ParameterList& params,
                     const std::vector<std::pair<std::string, Tensor*>>& state) {
  fs::create_directories(dir);

  json manifest;
  manifest["model_kind"] = model_kind;
  manifest["config"] = json::parse(config_json);
  json names = json::array();
  for (const auto& p : params) {
    json entry;
    entry["name"] = p->name;
    entry["shape"] = p->tensor().shape();
    names.push_back(entry);
    audio::tensor_write(p->tensor(), (fs::path(dir) / (p->name + ".tensor")).string());
  }
  manifest["parameters"] = names;
  json state_names = json::array();
  for (const auto& [name, tensor] : state) {
    state_names.push_back(name);
    audio::tensor_write(*tensor, (fs::path(dir) / (name + ".tensor")).string());
  }
  manifest["state"] = state_names;

  std::ofstream os(fs::path(dir) / "manifest.json", std::ios::trunc);
  if (!os) throw IoError("cannot write manifest in " + dir);
  os << manifest.dump(2) << '\n';
}

CheckpointManifest read_manifest(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "manifest.json");
  if (!is) throw IoError("cannot open manifest in " + dir);
  json manifest = json::parse(is);
  CheckpointManifest out;
  out.model_kind = manifest.at("model_kind").get<std::string>();
  out.config_json = manifest.at("config").dump();
  for (const auto& n : manifest.at("parameters"))
    out.parameter_names.push_back(n.at("name").get<std::string>());
  return out;
}

void load_checkpoint(const std::string& dir, const ParameterList& params,
                     const std::vector<std::pair<std::string, Tensor*>>& state) {
  for (const auto& p : params) {
    Tensor t = audio::tensor_read((fs::path(dir) / (p->name + ".tensor")).string());
    if (t.shape() != p->tensor().shape())
      throw Error("checkpoint: shape mismatch for " + p->name);
    p->tensor() = std::move(t);
  }
  for (const auto& [name, tensor] : state) {
    Tensor t = audio::tensor_read((fs::path(dir) / (name + ".tensor")).string());
    if (t.shape() != tensor->shape()) throw Error("checkpoint: shape mismatch for " + name);
    *tensor = std::move(t);
  }
}

}  // namespace evf::nn
