// Copyright 2026 The MMGCN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mmgcn/data.hpp"
#include "mmgcn/errors.hpp"
#include "mmgcn/model.hpp"
#include "mmgcn/train.hpp"

namespace mmgcn {

/// Malformed or schema-violating configuration documents.
class ConfigError : public ValueError {
 public:
  using ValueError::ValueError;
};

/// Everything one CLI run needs, serialized as a single JSON document. Every
/// section is optional; unknown keys anywhere are rejected.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  SyntheticConfig synthetic;
  std::string data_dir;
  std::string output_dir;
  std::uint64_t seed = 7;

  /// Desk-scale defaults used by `--config default`: the architecture defaults
  /// with a training schedule sized for the bundled synthetic data.
  static RunConfig desk_default();
};

nlohmann::json to_json(const ModelConfig& cfg);
nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const SyntheticConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);

/// Overlays `j` onto `base`; throws ConfigError on unknown keys or bad types.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j, SyntheticConfig base = {});
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = RunConfig::desk_default());

/// "default" yields RunConfig::desk_default(); anything else is a JSON file.
RunConfig load_run_config(const std::string& path_or_default);

/// SHA-256 of the canonical JSON form.
std::string config_digest(const nlohmann::json& j);

}  // namespace mmgcn
