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

#include <array>
#include <cstddef>
#include <filesystem>
#include <random>
#include <string>

#include "mmgcn/params.hpp"
#include "mmgcn/tensor.hpp"

namespace mmgcn {

enum class VisualSource { kStubEncoder, kPrecomputed };

/// Low-rate image features, [T_v, C_i].
struct VisualFeatures {
  Tensor feats;
  VisualSource source = VisualSource::kPrecomputed;
};

/// Small per-frame image encoder standing in for a pretrained video backbone:
/// two 3x3 convolutions with ReLU and a global spatial mean. It never mixes or
/// strides across time.
struct StubEncoderConfig {
  std::size_t hidden_channels = 8;
  std::size_t out_channels = 16;  // C_i
  std::size_t kernel = 3;
  std::size_t image_height = 480;  // used by the cost model
  std::size_t image_width = 640;

  void validate() const;
  bool operator==(const StubEncoderConfig&) const = default;
};

void init_stub_encoder(ParameterSet& params, const std::string& prefix, const StubEncoderConfig& cfg,
                       std::mt19937_64& rng);

/// frames: [T_v, H, W, 3] -> features [T_v, C_i].
VisualFeatures stub_visual_encoder(const Tensor& frames, const StubEncoderConfig& cfg, Bindings& params,
                                   const std::string& prefix);

/// Flat little-endian f64 file, row-major [t_v, channels].
VisualFeatures load_precomputed_features(const std::filesystem::path& path, std::size_t t_v, std::size_t channels);

struct RefinementConfig {
  bool enabled = true;
  std::size_t bottleneck_count = 3;
  std::array<std::size_t, 4> pyramid_bins{1, 2, 4, 8};
  std::size_t fused_channels = 32;  // C_f, even

  void validate() const;
  bool operator==(const RefinementConfig&) const = default;
};

/// Mean over nodes, then avg_pool_time down to t_v frames: [T_m, V, C] -> [t_v, C].
Tensor pool_motion_to_visual(const Tensor& encoded, std::size_t t_v);

void init_bottlenecks(ParameterSet& params, const std::string& prefix, std::size_t channels, std::size_t count,
                      std::mt19937_64& rng);

/// `count` residual blocks x + W2 relu(W1 x + b1) + b2 with a C -> C/2 -> C squeeze.
Tensor bottleneck_refine(const Tensor& x, std::size_t count, Bindings& params, const std::string& prefix);

/// Mean of four (avg_pool_time -> interpolate_time) branches plus the
/// interpolated input as a residual. Bin counts above T_v are clamped to T_v.
Tensor temporal_pyramid_pool(const Tensor& x, std::size_t t_out, const std::array<std::size_t, 4>& bins);

void init_refinement(ParameterSet& params, const std::string& prefix, const RefinementConfig& cfg,
                     std::size_t motion_channels, std::size_t visual_channels, std::mt19937_64& rng);

/// Merges pooled motion with visual features at the visual rate, refines them
/// and lifts the result back to the motion rate: [T_m, C_f]. With refinement
/// disabled the merged features are only projected and interpolated.
Tensor refine(const Tensor& encoded_motion, const VisualFeatures& visual, const RefinementConfig& cfg,
              Bindings& params, const std::string& prefix);

}  // namespace mmgcn
