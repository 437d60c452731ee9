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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mmgcn/model.hpp"

namespace mmgcn {

/// Binary checkpoint layout:
///   8 bytes  magic "MMGCNWT1"
///   u64 LE   header length in bytes
///   header   JSON {config, config_digest, params: [{name, shape}, ...]}
///   payload  little-endian f64 values of each parameter in header order
void save_weights(const std::filesystem::path& path, const Model& model);
Model load_weights(const std::filesystem::path& path);

/// The header of a checkpoint without decoding the payload.
nlohmann::json read_weights_header(const std::filesystem::path& path);

}  // namespace mmgcn
