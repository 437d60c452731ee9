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

#include "mmgcn/fusion.hpp"

#include <algorithm>

#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"

namespace mmgcn {

void StubEncoderConfig::validate() const {
  if (hidden_channels == 0 || out_channels == 0) throw ValueError("stub encoder widths must be positive");
  if (kernel == 0 || kernel % 2 == 0) throw ValueError("stub encoder kernel must be odd");
}

void init_stub_encoder(ParameterSet& params, const std::string& prefix, const StubEncoderConfig& cfg,
                       std::mt19937_64& rng) {
  cfg.validate();
  params.add_glorot(prefix + "conv1.kernel", {cfg.kernel, cfg.kernel, 3, cfg.hidden_channels}, rng);
  params.add_constant(prefix + "conv1.bias", {cfg.hidden_channels}, 0.0);
  params.add_glorot(prefix + "conv2.kernel", {cfg.kernel, cfg.kernel, cfg.hidden_channels, cfg.out_channels}, rng);
  params.add_constant(prefix + "conv2.bias", {cfg.out_channels}, 0.0);
}

VisualFeatures stub_visual_encoder(const Tensor& frames, const StubEncoderConfig& cfg, Bindings& params,
                                   const std::string& prefix) {
  cfg.validate();
  if (frames.rank() != 4 || frames.dim(0) == 0 || frames.dim(3) != 3) {
    throw ShapeError("stub_visual_encoder: expected frames [T_v, H, W, 3], got " + shape_to_string(frames.shape()));
  }
  Tensor h = relu(add_bias(conv_spatial(frames, params.get(prefix + "conv1.kernel")), params.get(prefix + "conv1.bias")));
  h = relu(add_bias(conv_spatial(h, params.get(prefix + "conv2.kernel")), params.get(prefix + "conv2.bias")));
  return {mean(mean(h, 1), 1), VisualSource::kStubEncoder};
}

VisualFeatures load_precomputed_features(const std::filesystem::path& path, std::size_t t_v, std::size_t channels) {
  if (t_v == 0 || channels == 0) throw ShapeError("precomputed features need positive dimensions");
  return {Tensor::from_data({t_v, channels}, read_f64_file(path, t_v * channels)), VisualSource::kPrecomputed};
}

void RefinementConfig::validate() const {
  if (fused_channels == 0 || fused_channels % 2 != 0) throw ValueError("fused channel width must be even and positive");
  for (std::size_t b : pyramid_bins) {
    if (b == 0) throw ValueError("pyramid bin counts must be positive");
  }
}

Tensor pool_motion_to_visual(const Tensor& encoded, std::size_t t_v) {
  if (encoded.rank() != 3) {
    throw ShapeError("pool_motion_to_visual: expected [T_m, V, C], got " + shape_to_string(encoded.shape()));
  }
  if (t_v == 0 || encoded.dim(0) % t_v != 0) {
    throw ShapeError("pool_motion_to_visual: T_m=" + std::to_string(encoded.dim(0)) + " not divisible by T_v=" +
                     std::to_string(t_v));
  }
  return avg_pool_time(mean(encoded, 1), t_v);
}

void init_bottlenecks(ParameterSet& params, const std::string& prefix, std::size_t channels, std::size_t count,
                      std::mt19937_64& rng) {
  if (channels % 2 != 0) throw ShapeError("bottleneck width must be even, got " + std::to_string(channels));
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = prefix + "block" + std::to_string(i) + ".";
    params.add_glorot(name + "squeeze.weight", {channels, channels / 2}, rng);
    params.add_constant(name + "squeeze.bias", {channels / 2}, 0.0);
    params.add_glorot(name + "expand.weight", {channels / 2, channels}, rng);
    params.add_constant(name + "expand.bias", {channels}, 0.0);
  }
}

Tensor bottleneck_refine(const Tensor& x, std::size_t count, Bindings& params, const std::string& prefix) {
  if (x.rank() != 2) throw ShapeError("bottleneck_refine: expected [T, C], got " + shape_to_string(x.shape()));
  if (x.dim(1) % 2 != 0) throw ShapeError("bottleneck_refine: channel width " + std::to_string(x.dim(1)) + " is odd");
  Tensor h = x;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = prefix + "block" + std::to_string(i) + ".";
    Tensor z = relu(add_bias(linear(h, params.get(name + "squeeze.weight")), params.get(name + "squeeze.bias")));
    z = add_bias(linear(z, params.get(name + "expand.weight")), params.get(name + "expand.bias"));
    h = add(h, z);
  }
  return h;
}

Tensor temporal_pyramid_pool(const Tensor& x, std::size_t t_out, const std::array<std::size_t, 4>& bins) {
  if (x.rank() != 2) throw ShapeError("temporal_pyramid_pool: expected [T, C], got " + shape_to_string(x.shape()));
  const std::size_t t_in = x.dim(0);
  if (t_out < t_in) throw ShapeError("temporal_pyramid_pool: t_out below input length");
  Tensor branches;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i] == 0) throw ValueError("temporal_pyramid_pool: zero bin count");
    Tensor b = interpolate_time(avg_pool_time(x, std::min(bins[i], t_in)), t_out);
    branches = i == 0 ? b : add(branches, b);
  }
  return add(scale(branches, 1.0 / static_cast<double>(bins.size())), interpolate_time(x, t_out));
}

void init_refinement(ParameterSet& params, const std::string& prefix, const RefinementConfig& cfg,
                     std::size_t motion_channels, std::size_t visual_channels, std::mt19937_64& rng) {
  cfg.validate();
  params.add_glorot(prefix + "proj.weight", {motion_channels + visual_channels, cfg.fused_channels}, rng);
  params.add_constant(prefix + "proj.bias", {cfg.fused_channels}, 0.0);
  if (cfg.enabled) init_bottlenecks(params, prefix + "bottleneck.", cfg.fused_channels, cfg.bottleneck_count, rng);
}

Tensor refine(const Tensor& encoded_motion, const VisualFeatures& visual, const RefinementConfig& cfg,
              Bindings& params, const std::string& prefix) {
  cfg.validate();
  const Tensor& vis = visual.feats;
  if (vis.rank() != 2 || vis.dim(0) == 0) {
    throw ShapeError("refine: visual features must be [T_v, C_i], got " + shape_to_string(vis.shape()));
  }
  const std::size_t t_v = vis.dim(0), t_m = encoded_motion.dim(0);
  Tensor merged = concat({pool_motion_to_visual(encoded_motion, t_v), vis}, 1);
  Tensor h = add_bias(linear(merged, params.get(prefix + "proj.weight")), params.get(prefix + "proj.bias"));
  if (!cfg.enabled) return interpolate_time(h, t_m);
  h = bottleneck_refine(h, cfg.bottleneck_count, params, prefix + "bottleneck.");
  return temporal_pyramid_pool(h, t_m, cfg.pyramid_bins);
}

}  // namespace mmgcn
