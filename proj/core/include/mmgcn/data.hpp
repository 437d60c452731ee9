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
#include <vector>

#include "mmgcn/graph.hpp"
#include "mmgcn/tensor.hpp"

namespace mmgcn {

/// Per-frame 3D positions of skeleton joints followed by object centers.
/// Invariant: valid[t, v] == 0 implies positions[t, v, :] == 0.
struct MotionSequence {
  std::size_t frames = 0;
  std::size_t nodes = 0;
  std::size_t object_count = 0;
  std::vector<double> positions;     // [T, V, 3], meters
  std::vector<std::uint8_t> valid;   // [T, V], 0 or 1

  double& position(std::size_t t, std::size_t v, std::size_t axis) { return positions[(t * nodes + v) * 3 + axis]; }
  double position(std::size_t t, std::size_t v, std::size_t axis) const {
    return positions[(t * nodes + v) * 3 + axis];
  }
  bool is_valid(std::size_t t, std::size_t v) const { return valid[t * nodes + v] != 0; }

  /// Checks sizes and the masked-position invariant.
  void validate() const;
  bool operator==(const MotionSequence&) const = default;
};

struct DatasetMeta {
  std::size_t sequence_count = 0;
  std::size_t motion_frames = 120;  // T_m
  std::size_t visual_frames = 4;    // T_v
  std::size_t joint_count = 10;
  std::size_t object_count = 2;
  std::size_t num_classes = 5;
  std::vector<std::string> class_names;
  std::size_t visual_channels = 16;  // C_i
  SkeletonDef skeleton;

  std::size_t node_count() const { return joint_count + object_count; }
  /// Enforces T_m % T_v == 0 and skeleton/class consistency.
  void validate() const;
  bool operator==(const DatasetMeta&) const = default;
};

struct Sequence {
  MotionSequence motion;
  std::vector<double> visual;  // [T_v, C_i]
  std::vector<int> labels;     // [T_m]

  bool operator==(const Sequence&) const = default;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Sequence> sequences;

  Tensor visual_tensor(std::size_t index) const;
  /// First `count` sequences and the rest, with metas adjusted.
  std::pair<Dataset, Dataset> split(std::size_t count) const;
  bool operator==(const Dataset&) const = default;
};

struct SyntheticConfig {
  std::size_t sequence_count = 64;
  std::size_t motion_frames = 120;
  std::size_t visual_frames = 4;
  std::size_t object_count = 2;
  std::size_t num_classes = 5;
  std::size_t visual_channels = 16;
  std::size_t min_segment = 20;
  std::size_t max_segment = 50;
  std::size_t transition = 6;
  double position_noise = 0.005;  // meters
  double visual_noise = 0.1;
  std::uint64_t seed = 7;

  void validate() const;
};

/// Deterministic synthetic manipulation dataset: each sequence walks over
/// action classes with class-specific joint oscillations and object-to-hand
/// attachment, blended linearly across transitions.
Dataset generate_synthetic(const SyntheticConfig& cfg);

/// Directory layout: meta.json, motion_<i>.f64, valid_<i>.bits,
/// visual_<i>.f64, labels_<i>.csv.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

struct NoiseConfig {
  double node_drop_rate = 0.0;
  std::uint64_t seed = 0;
};

/// Independently per (frame, node), with probability node_drop_rate, zeroes
/// the position and clears the validity flag.
MotionSequence inject_node_dropout(const MotionSequence& motion, const NoiseConfig& cfg);

/// Applies inject_node_dropout to every sequence with per-sequence seeds.
Dataset inject_node_dropout(const Dataset& dataset, const NoiseConfig& cfg);

}  // namespace mmgcn
