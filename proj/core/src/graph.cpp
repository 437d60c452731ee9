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

#include "mmgcn/graph.hpp"

#include <cmath>

#include "mmgcn/errors.hpp"

namespace mmgcn {

void SkeletonDef::validate() const {
  if (joint_count == 0) throw ValueError("skeleton has no joints");
  for (const auto& [a, b] : edges) {
    if (a >= joint_count || b >= joint_count) {
      throw ValueError("skeleton edge (" + std::to_string(a) + "," + std::to_string(b) + ") references a joint >= " +
                       std::to_string(joint_count));
    }
    if (a == b) throw ValueError("skeleton edge is a self-loop at joint " + std::to_string(a));
  }
  for (std::size_t h : hand_joint_indices) {
    if (h >= joint_count) throw ValueError("hand joint index " + std::to_string(h) + " out of range");
  }
}

SkeletonDef SkeletonDef::upper_body() {
  SkeletonDef s;
  s.joint_count = 10;
  // 0 pelvis, 1 spine, 2 neck, 3 head, 4-6 left shoulder/elbow/hand, 7-9 right.
  s.edges = {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {4, 5}, {5, 6}, {2, 7}, {7, 8}, {8, 9}};
  s.hand_joint_indices = {6, 9};
  return s;
}

void GcnStreamConfig::validate() const {
  if (channels.empty()) throw ValueError("gcn stream needs at least one stage");
  for (std::size_t c : channels) {
    if (c == 0) throw ValueError("gcn stage width must be positive");
  }
  if (temporal_kernel == 0 || temporal_kernel % 2 == 0) throw ValueError("gcn temporal kernel must be odd");
}

Graph build_graph(const SkeletonDef& skeleton, std::size_t max_objects) {
  skeleton.validate();
  Graph g;
  g.node_count = skeleton.joint_count + max_objects;
  const std::size_t v = g.node_count;
  g.adjacency.assign(v * v, 0.0);
  auto link = [&](std::size_t a, std::size_t b) {
    g.adjacency[a * v + b] = 1.0;
    g.adjacency[b * v + a] = 1.0;
  };
  for (const auto& [a, b] : skeleton.edges) link(a, b);
  for (std::size_t o = 0; o < max_objects; ++o) {
    for (std::size_t h : skeleton.hand_joint_indices) link(skeleton.joint_count + o, h);
  }
  g.normalized = normalize_adjacency(Tensor::from_data({v, v}, g.adjacency));
  return g;
}

Tensor normalize_adjacency(const Tensor& adjacency) {
  if (adjacency.rank() != 2 || adjacency.dim(0) != adjacency.dim(1)) {
    throw ShapeError("normalize_adjacency: expected a square matrix, got " + shape_to_string(adjacency.shape()));
  }
  const std::size_t v = adjacency.dim(0);
  auto a = adjacency.data();
  std::vector<double> inv_sqrt_deg(v);
  for (std::size_t i = 0; i < v; ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < v; ++j) d += a[i * v + j];
    inv_sqrt_deg[i] = 1.0 / std::sqrt(d);
  }
  std::vector<double> out(v * v);
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t j = 0; j < v; ++j) {
      const double aij = a[i * v + j] + (i == j ? 1.0 : 0.0);
      out[i * v + j] = inv_sqrt_deg[i] * aij * inv_sqrt_deg[j];
    }
  }
  return Tensor::from_data({v, v}, std::move(out));
}

Tensor spatial_graph_conv(const Tensor& x, const Tensor& normalized, const Tensor& weights, const Tensor& mask) {
  if (x.rank() != 3 || normalized.rank() != 2 || normalized.dim(0) != x.dim(1) || mask.shape() != normalized.shape()) {
    throw ShapeError("spatial_graph_conv: input " + shape_to_string(x.shape()) + ", adjacency " +
                     shape_to_string(normalized.shape()) + ", mask " + shape_to_string(mask.shape()) +
                     " are inconsistent");
  }
  if (weights.rank() != 2 || weights.dim(0) != x.dim(2)) {
    throw ShapeError("spatial_graph_conv: weights " + shape_to_string(weights.shape()) + " do not match input " +
                     shape_to_string(x.shape()));
  }
  // Project channels first when that shrinks the node-mixing work.
  const Tensor adj = mul(normalized, mask);
  if (weights.dim(1) < weights.dim(0)) return node_mix(adj, linear(x, weights));
  return linear(node_mix(adj, x), weights);
}

namespace {

std::string stage_name(const std::string& prefix, const char* kind, std::size_t i) {
  return prefix + kind + std::to_string(i) + ".";
}

Tensor gconv_layer(const Tensor& x, const Graph& graph, Bindings& p, const std::string& name) {
  return spatial_graph_conv(x, graph.normalized, p.get(name + "gconv.weight"), p.get(name + "gconv.mask"));
}

}  // namespace

void init_gcn_stream(ParameterSet& params, const std::string& prefix, const GcnStreamConfig& cfg, std::size_t nodes,
                     std::size_t in_channels, std::mt19937_64& rng) {
  cfg.validate();
  std::size_t c_in = in_channels;
  for (std::size_t i = 0; i < cfg.stages(); ++i) {
    const std::string name = stage_name(prefix, "enc", i);
    const std::size_t w = cfg.channels[i];
    params.add_glorot(name + "gconv.weight", {c_in, w}, rng);
    params.add_constant(name + "gconv.mask", {nodes, nodes}, 1.0);
    params.add_glorot(name + "tconv.kernel", {cfg.temporal_kernel, w, w}, rng);
    params.add_constant(name + "tconv.bias", {w}, 0.0);
    c_in = w;
  }
  // Decoder stage i restores the resolution and width of encoder stage i.
  for (std::size_t i = cfg.stages(); i-- > 0;) {
    const std::string name = stage_name(prefix, "dec", i);
    const std::size_t w = cfg.channels[i];
    params.add_glorot(name + "gconv.weight", {c_in, w}, rng);
    params.add_constant(name + "gconv.mask", {nodes, nodes}, 1.0);
    c_in = w;
  }
}

Tensor gcn_encoder_decoder_nodes(const Tensor& x, const Graph& graph, const GcnStreamConfig& cfg, Bindings& params,
                                 const std::string& prefix) {
  cfg.validate();
  if (x.rank() != 3 || x.dim(1) != graph.node_count) {
    throw ShapeError("gcn_encoder_decoder: input " + shape_to_string(x.shape()) + " does not match a graph of " +
                     std::to_string(graph.node_count) + " nodes");
  }
  const std::size_t frames = x.dim(0);
  const std::size_t factor = std::size_t{1} << cfg.stages();
  if (frames % factor != 0) {
    throw ShapeError("gcn_encoder_decoder: T=" + std::to_string(frames) + " is not divisible by 2^" +
                     std::to_string(cfg.stages()));
  }

  std::vector<Tensor> skips;
  Tensor h = x;
  for (std::size_t i = 0; i < cfg.stages(); ++i) {
    const std::string name = stage_name(prefix, "enc", i);
    Tensor a = relu(gconv_layer(h, graph, params, name));
    skips.push_back(a);
    h = add_bias(conv_time(a, params.get(name + "tconv.kernel"), 2, Padding::kReplicate),
                 params.get(name + "tconv.bias"));
  }
  for (std::size_t i = cfg.stages(); i-- > 0;) {
    const std::string name = stage_name(prefix, "dec", i);
    Tensor up = interpolate_time(h, frames >> i);
    h = relu(gconv_layer(up, graph, params, name));
    if (cfg.skip_connections) {
      if (skips[i].shape() != h.shape()) {
        throw ShapeError("gcn skip connection: " + shape_to_string(skips[i].shape()) + " vs " +
                         shape_to_string(h.shape()));
      }
      h = add(h, skips[i]);
    }
  }
  return h;
}

Tensor gcn_encoder_decoder(const Tensor& x, const Graph& graph, const GcnStreamConfig& cfg, Bindings& params,
                           const std::string& prefix) {
  return mean(gcn_encoder_decoder_nodes(x, graph, cfg, params, prefix), 1);
}

}  // namespace mmgcn
