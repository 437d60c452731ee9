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

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mmgcn/params.hpp"
#include "mmgcn/tensor.hpp"

namespace mmgcn {

/// Body keypoint topology. Edges are undirected and stored once.
struct SkeletonDef {
  std::size_t joint_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  /// Joints that object nodes attach to.
  std::vector<std::size_t> hand_joint_indices;

  void validate() const;
  bool operator==(const SkeletonDef&) const = default;

  /// Ten-joint upper body: pelvis, spine, neck, head and two three-joint arms.
  static SkeletonDef upper_body();
};

/// Joint-plus-object graph with its self-looped symmetric normalization.
struct Graph {
  std::size_t node_count = 0;
  std::vector<double> adjacency;  // [V, V], entries in {0, 1}
  Tensor normalized;              // [V, V], D^-1/2 (A + I) D^-1/2

  double adj(std::size_t a, std::size_t b) const { return adjacency[a * node_count + b]; }
};

/// Skeleton edges plus one edge from every object node to every hand joint.
/// Object nodes occupy indices joint_count .. joint_count + max_objects - 1.
Graph build_graph(const SkeletonDef& skeleton, std::size_t max_objects);

/// D^-1/2 (A + I) D^-1/2 for a square symmetric 0/1 matrix given as [V, V].
Tensor normalize_adjacency(const Tensor& adjacency);

/// Per frame: Y = (normalized ⊙ mask) · X · W, for x[T, V, C_in].
Tensor spatial_graph_conv(const Tensor& x, const Tensor& normalized, const Tensor& weights, const Tensor& mask);

struct GcnStreamConfig {
  /// Output width of each encoder stage; decoder stages mirror them.
  std::vector<std::size_t> channels{16, 32};
  std::size_t temporal_kernel = 3;
  bool skip_connections = true;

  std::size_t stages() const { return channels.size(); }
  std::size_t out_channels() const { return channels.front(); }
  void validate() const;
  bool operator==(const GcnStreamConfig&) const = default;
};

void init_gcn_stream(ParameterSet& params, const std::string& prefix, const GcnStreamConfig& cfg,
                     std::size_t nodes, std::size_t in_channels, std::mt19937_64& rng);

/// Graph encoder-decoder over x[T, V, C]. Returns node-mean pooled [T, C_g].
Tensor gcn_encoder_decoder(const Tensor& x, const Graph& graph, const GcnStreamConfig& cfg, Bindings& params,
                           const std::string& prefix);

/// Same network without the final node pooling: [T, V, C_g].
Tensor gcn_encoder_decoder_nodes(const Tensor& x, const Graph& graph, const GcnStreamConfig& cfg,
                                 Bindings& params, const std::string& prefix);

}  // namespace mmgcn
