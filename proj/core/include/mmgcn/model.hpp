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
#include <string>
#include <vector>

#include "mmgcn/data.hpp"
#include "mmgcn/encoding.hpp"
#include "mmgcn/fusion.hpp"
#include "mmgcn/graph.hpp"
#include "mmgcn/params.hpp"

namespace mmgcn {

/// Where the visual stream meets the motion stream.
///   early:    visual features upsampled and appended to every node's input
///   mid:      refinement output concatenated with the GCN output
///   late:     separate classifiers on both streams, logits averaged
///   mid_late: mid concatenation plus a refinement-only classifier, averaged
enum class FusionStrategy { kEarly, kMid, kLate, kMidLate };

const char* to_string(FusionStrategy s);
FusionStrategy fusion_from_string(const std::string& s);

struct ModelConfig {
  SinusoidalParams encoding;
  bool use_sinusoidal = true;
  GcnStreamConfig gcn;
  RefinementConfig refinement;
  StubEncoderConfig visual_encoder;
  FusionStrategy fusion = FusionStrategy::kMidLate;
  std::size_t num_classes = 5;
  std::size_t classifier_kernel = 3;
  SkeletonDef skeleton = SkeletonDef::upper_body();
  std::size_t object_count = 2;
  std::size_t motion_frames = 120;   // T_m
  std::size_t visual_frames = 4;     // T_v
  std::size_t visual_channels = 16;  // C_i

  std::size_t node_count() const { return skeleton.joint_count + object_count; }
  std::size_t node_feature_width() const { return use_sinusoidal ? encoding.embedding_size() : 3; }
  void validate() const;
  /// Copies the shape-related fields of a dataset into this config.
  void adopt(const DatasetMeta& meta);
  bool operator==(const ModelConfig&) const = default;
};

void init_classifier(ParameterSet& params, const std::string& prefix, std::size_t channels, std::size_t num_classes,
                     std::size_t kernel, std::mt19937_64& rng);

/// conv_time(k, C -> C/2, replicate) -> relu -> conv_time(1, C/2 -> K), both with bias.
Tensor classifier(const Tensor& features, Bindings& params, const std::string& prefix);

class Model {
 public:
  explicit Model(ModelConfig cfg, std::uint64_t seed = 0);
  /// Adopts existing weights; throws if their names or shapes differ from
  /// what `cfg` requires.
  Model(ModelConfig cfg, ParameterSet params);

  const ModelConfig& config() const { return cfg_; }
  const Graph& graph() const { return graph_; }
  const ParameterSet& params() const { return params_; }
  ParameterSet& params() { return params_; }

  /// Sinusoidal embedding (or raw positions) of every node: [T, V, F].
  Tensor node_features(const MotionSequence& motion) const;
  /// Differentiable forward pass from node features to logits [T_m, K].
  Tensor forward(const Tensor& node_features, const VisualFeatures& visual, Bindings& bindings) const;
  /// Untracked logits for one sequence.
  Tensor logits(const MotionSequence& motion, const VisualFeatures& visual) const;

 private:
  ModelConfig cfg_;
  Graph graph_;
  ParameterSet params_;
};

Tensor mmgcn_forward(const MotionSequence& motion, const VisualFeatures& visual, const Model& model);

/// Per-frame argmax; ties go to the lowest class index.
std::vector<int> predict_segments(const Tensor& logits);

/// Multiply-accumulate counts per network branch.
struct FlopBreakdown {
  double visual_encoder = 0.0;
  double refinement = 0.0;
  double gcn = 0.0;
  double classifier = 0.0;

  double total() const { return visual_encoder + refinement + gcn + classifier; }
};

/// Analytic MAC count of one forward pass over a T_m-frame motion window with
/// T_v image frames (visual branch included even when features are precomputed).
FlopBreakdown estimate_flops(const ModelConfig& cfg, std::size_t t_m, std::size_t t_v);

}  // namespace mmgcn
