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

#include "mmgcn/weights.hpp"

#include <string_view>

#include "mmgcn/config.hpp"
#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"

namespace mmgcn {

namespace {

constexpr std::string_view kMagic = "MMGCNWT1";

struct Parsed {
  nlohmann::json header;
  std::string_view payload;
};

Parsed parse(const std::string& bytes, const std::filesystem::path& path) {
  const std::string name = path.string();
  if (bytes.size() < kMagic.size() + 8 || std::string_view(bytes).substr(0, kMagic.size()) != kMagic) {
    throw DataError(name + ": not a weights file (bad magic)");
  }
  const std::uint64_t len = decode_u64_le(std::string_view(bytes).substr(kMagic.size(), 8));
  const std::size_t start = kMagic.size() + 8;
  if (len > bytes.size() - start) throw DataError(name + ": truncated header");
  Parsed p;
  try {
    p.header = nlohmann::json::parse(bytes.substr(start, len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(name + ": corrupt header (" + e.what() + ")");
  }
  p.payload = std::string_view(bytes).substr(start + len);
  return p;
}

}  // namespace

void save_weights(const std::filesystem::path& path, const Model& model) {
  nlohmann::json header;
  header["config"] = to_json(model.config());
  header["config_digest"] = config_digest(header["config"]);
  header["params"] = nlohmann::json::array();
  std::string payload;
  for (const auto& [name, p] : model.params().entries()) {
    header["params"].push_back({{"name", name}, {"shape", p.shape}});
    append_f64_le(payload, p.values);
  }
  const std::string h = header.dump();
  std::string out(kMagic);
  append_u64_le(out, h.size());
  out += h;
  out += payload;
  write_file_atomic(path, out);
}

nlohmann::json read_weights_header(const std::filesystem::path& path) {
  return parse(read_file(path), path).header;
}

Model load_weights(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const Parsed p = parse(bytes, path);
  const std::string name = path.string();
  ModelConfig cfg;
  try {
    cfg = model_config_from_json(p.header.at("config"));
    if (p.header.at("config_digest").get<std::string>() != config_digest(p.header.at("config"))) {
      throw DataError(name + ": config digest mismatch");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(name + ": malformed header (" + e.what() + ")");
  } catch (const ConfigError& e) {
    throw DataError(name + ": " + e.what());
  }
  ParameterSet params;
  std::size_t offset = 0;
  try {
    for (const auto& entry : p.header.at("params")) {
      Shape shape = entry.at("shape").get<Shape>();
      const std::size_t n = shape_numel(shape) * 8;
      if (offset + n > p.payload.size()) throw DataError(name + ": truncated payload");
      params.add(entry.at("name").get<std::string>(), shape, decode_f64_le(p.payload.substr(offset, n)));
      offset += n;
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(name + ": malformed parameter table (" + e.what() + ")");
  }
  if (offset != p.payload.size()) throw DataError(name + ": trailing bytes after payload");
  try {
    return Model(cfg, std::move(params));
  } catch (const std::invalid_argument& e) {
    throw DataError(name + ": " + e.what());
  }
}

}  // namespace mmgcn
