// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "evf/nn/autodiff.hpp"

namespace evf::nn {

// Checkpoint layout: <dir>/manifest.json plus one tensor file per parameter
// (and per state tensor), named by parameter path. The manifest records the
// model kind, its configuration and the parameter names/shapes.
void save_checkpoint(const std::string& dir, const std::string& model_kind,
                     const std::string& config_json, const ParameterList& params,
                     const std::vector<std::pair<std::string, Tensor*>>& state = {});

struct CheckpointManifest {
  std::string model_kind;
  std::string config_json;
  std::vector<std::string> parameter_names;
};

CheckpointManifest read_manifest(const std::string& dir);

// Loads tensors by name into an existing parameter list; shapes must match.
void load_checkpoint(const std::string& dir, const ParameterList& params,
                     const std::vector<std::pair<std::string, Tensor*>>& state = {});

}  // namespace evf::nn
