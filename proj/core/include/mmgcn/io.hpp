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
#include <span>
#include <string>
#include <vector>

namespace mmgcn {

/// Little-endian encoding of doubles, independent of host byte order.
void append_f64_le(std::string& out, std::span<const double> values);
std::vector<double> decode_f64_le(std::string_view bytes);
void append_u64_le(std::string& out, std::uint64_t value);
std::uint64_t decode_u64_le(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Reads a flat little-endian f64 file holding exactly `expected` values.
std::vector<double> read_f64_file(const std::filesystem::path& path, std::size_t expected);
void write_f64_file(const std::filesystem::path& path, std::span<const double> values);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// SplitMix64 step; derives independent child seeds from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace mmgcn
