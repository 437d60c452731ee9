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

#include "mmgcn/model.hpp"

#include <algorithm>

#include "mmgcn/errors.hpp"

namespace mmgcn {

const char* to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::kEarly:
      return "early";
    case FusionStrategy::kMid:
      return "mid";
    case FusionStrategy::kLate:
      return "late";
    case FusionStrategy::kMidLate:
      return "mid_late";
  }
  return "?";
}

FusionStrategy fusion_from_string(const std::string& s) {
  if (s == "early") return FusionStrategy::kEarly;
  if (s == "mid") return FusionStrategy::kMid;
  if (s == "late") return FusionStrategy::kLate;
  if (s == "mid_late") return FusionStrategy::kMidLate;
  throw ValueError("unknown fusion strategy '" + s + "' (expected early, mid, late or mid_late)");
}

void ModelConfig::validate() const {
  encoding.validate();
  gcn.validate();
  refinement.validate();
  visual_encoder.validate();
  skeleton.validate();
  if (num_classes < 2) throw ValueError("model needs at least two classes");
  if (classifier_kernel == 0 || classifier_kernel % 2 == 0) throw ValueError("classifier kernel must be odd");
  if (visual_frames == 0 || motion_frames % visual_frames != 0) {
    throw ValueError("motion_frames must be a positive multiple of visual_frames");
  }
  if (motion_frames % (std::size_t{1} << gcn.stages()) != 0) {
    throw ValueError("motion_frames " + std::to_string(motion_frames) + " not divisible by 2^" +
                     std::to_string(gcn.stages()));
  }
  if (visual_channels == 0) throw ValueError("visual_channels must be positive");
  const std::size_t cg = gcn.out_channels(), cf = refinement.fused_channels;
  auto need_even = [](std::size_t c, const char* what) {
    if (c % 2 != 0) throw ValueError(std::string("classifier input width must be even (") + what + ")");
  };
  switch (fusion) {
    case FusionStrategy::kEarly:
      need_even(cg, "gcn output");
      break;
    case FusionStrategy::kMid:
      need_even(cg + cf, "gcn + refinement");
      break;
    case FusionStrategy::kLate:
      need_even(cg, "gcn output");
      need_even(cf, "refinement output");
      break;
    case FusionStrategy::kMidLate:
      need_even(cg + cf, "gcn + refinement");
      need_even(cf, "refinement output");
      break;
  }
}

void ModelConfig::adopt(const DatasetMeta& meta) {
  skeleton = meta.skeleton;
  object_count = meta.object_count;
  num_classes = meta.num_classes;
  motion_frames = meta.motion_frames;
  visual_frames = meta.visual_frames;
  visual_channels = meta.visual_channels;
}

void init_classifier(ParameterSet& params, const std::string& prefix, std::size_t channels, std::size_t num_classes,
                     std::size_t kernel, std::mt19937_64& rng) {
  if (channels % 2 != 0) throw ShapeError("classifier input width must be even, got " + std::to_string(channels));
  params.add_glorot(prefix + "conv1.kernel", {kernel, channels, channels / 2}, rng);
  params.add_constant(prefix + "conv1.bias", {channels / 2}, 0.0);
  params.add_glorot(prefix + "conv2.kernel", {1, channels / 2, num_classes}, rng);
  params.add_constant(prefix + "conv2.bias", {num_classes}, 0.0);
}

Tensor classifier(const Tensor& features, Bindings& params, const std::string& prefix) {
  if (features.rank() != 2 || features.dim(1) % 2 != 0) {
    throw ShapeError("classifier: expected [T, C] with even C, got " + shape_to_string(features.shape()));
  }
  Tensor h = conv_time(features, params.get(prefix + "conv1.kernel"), 1, Padding::kReplicate);
  h = relu(add_bias(h, params.get(prefix + "conv1.bias")));
  return add_bias(conv_time(h, params.get(prefix + "conv2.kernel"), 1, Padding::kNone), params.get(prefix + "conv2.bias"));
}

namespace {

ParameterSet init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  ParameterSet p;
  const std::size_t v = cfg.node_count(), f = cfg.node_feature_width(), k = cfg.num_classes;
  const std::size_t cg = cfg.gcn.out_channels(), cf = cfg.refinement.fused_channels;
  const std::size_t gcn_in = cfg.fusion == FusionStrategy::kEarly ? f + cfg.visual_channels : f;
  init_gcn_stream(p, "gcn.", cfg.gcn, v, gcn_in, rng);
  switch (cfg.fusion) {
    case FusionStrategy::kEarly:
      init_classifier(p, "cls.", cg, k, cfg.classifier_kernel, rng);
      break;
    case FusionStrategy::kMid:
      init_refinement(p, "refine.", cfg.refinement, f, cfg.visual_channels, rng);
      init_classifier(p, "cls.", cg + cf, k, cfg.classifier_kernel, rng);
      break;
    case FusionStrategy::kLate:
      init_refinement(p, "refine.", cfg.refinement, f, cfg.visual_channels, rng);
      init_classifier(p, "cls.", cg, k, cfg.classifier_kernel, rng);
      init_classifier(p, "cls_refine.", cf, k, cfg.classifier_kernel, rng);
      break;
    case FusionStrategy::kMidLate:
      init_refinement(p, "refine.", cfg.refinement, f, cfg.visual_channels, rng);
      init_classifier(p, "cls.", cg + cf, k, cfg.classifier_kernel, rng);
      init_classifier(p, "cls_refine.", cf, k, cfg.classifier_kernel, rng);
      break;
  }
  return p;
}

}  // namespace

Model::Model(ModelConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), graph_(build_graph(cfg_.skeleton, cfg_.object_count)), params_(init_params(cfg_, seed)) {}

Model::Model(ModelConfig cfg, ParameterSet params) : Model(std::move(cfg), 0) {
  const auto& want = params_.entries();
  const auto& got = params.entries();
  if (want.size() != got.size()) {
    throw ShapeError("weights hold " + std::to_string(got.size()) + " tensors, config expects " +
                     std::to_string(want.size()));
  }
  for (auto a = want.begin(), b = got.begin(); a != want.end(); ++a, ++b) {
    if (a->first != b->first || a->second.shape != b->second.shape) {
      throw ShapeError("weights entry '" + b->first + "' " + shape_to_string(b->second.shape) +
                       " does not match expected '" + a->first + "' " + shape_to_string(a->second.shape));
    }
  }
  params_ = std::move(params);
}

Tensor Model::node_features(const MotionSequence& motion) const {
  if (motion.frames != cfg_.motion_frames || motion.nodes != cfg_.node_count()) {
    throw ShapeError("motion sequence [" + std::to_string(motion.frames) + "," + std::to_string(motion.nodes) +
                     "] does not match model [" + std::to_string(cfg_.motion_frames) + "," +
                     std::to_string(cfg_.node_count()) + "]");
  }
  return cfg_.use_sinusoidal ? encode_sequence(motion, cfg_.encoding) : raw_positions(motion);
}

Tensor Model::forward(const Tensor& features, const VisualFeatures& visual, Bindings& b) const {
  const std::size_t t_m = cfg_.motion_frames;
  if (features.rank() != 3 || features.dim(0) != t_m || features.dim(1) != cfg_.node_count() ||
      features.dim(2) != cfg_.node_feature_width()) {
    throw ShapeError("model input " + shape_to_string(features.shape()) + " does not match config");
  }
  const Tensor& vis = visual.feats;
  if (vis.rank() != 2 || vis.dim(1) != cfg_.visual_channels || vis.dim(0) == 0 || t_m % vis.dim(0) != 0) {
    throw ShapeError("visual features " + shape_to_string(vis.shape()) + " incompatible with T_m=" +
                     std::to_string(t_m) + ", C_i=" + std::to_string(cfg_.visual_channels));
  }

  if (cfg_.fusion == FusionStrategy::kEarly) {
    Tensor vis_nodes = broadcast_nodes(interpolate_time(vis, t_m), cfg_.node_count());
    Tensor g = gcn_encoder_decoder(concat({features, vis_nodes}, 2), graph_, cfg_.gcn, b, "gcn.");
    return classifier(g, b, "cls.");
  }

  Tensor g = gcn_encoder_decoder(features, graph_, cfg_.gcn, b, "gcn.");
  Tensor r = refine(features, visual, cfg_.refinement, b, "refine.");
  switch (cfg_.fusion) {
    case FusionStrategy::kMid:
      return classifier(concat({g, r}, 1), b, "cls.");
    case FusionStrategy::kLate:
      return scale(add(classifier(g, b, "cls."), classifier(r, b, "cls_refine.")), 0.5);
    case FusionStrategy::kMidLate:
      return scale(add(classifier(concat({g, r}, 1), b, "cls."), classifier(r, b, "cls_refine.")), 0.5);
    case FusionStrategy::kEarly:
      break;
  }
  throw ValueError("unhandled fusion strategy");
}

Tensor Model::logits(const MotionSequence& motion, const VisualFeatures& visual) const {
  Bindings b(params_, false);
  return forward(node_features(motion), visual, b);
}

Tensor mmgcn_forward(const MotionSequence& motion, const VisualFeatures& visual, const Model& model) {
  return model.logits(motion, visual);
}

std::vector<int> predict_segments(const Tensor& logits) {
  if (logits.rank() != 2 || logits.dim(1) == 0) {
    throw ShapeError("predict_segments: expected [T, K], got " + shape_to_string(logits.shape()));
  }
  const std::size_t t = logits.dim(0), k = logits.dim(1);
  auto d = logits.data();
  std::vector<int> out(t);
  for (std::size_t f = 0; f < t; ++f) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (d[f * k + c] > d[f * k + best]) best = c;
    }
    out[f] = static_cast<int>(best);
  }
  return out;
}

FlopBreakdown estimate_flops(const ModelConfig& cfg, std::size_t t_m, std::size_t t_v) {
  cfg.validate();
  if (t_v == 0 || t_m == 0) throw ValueError("estimate_flops: frame counts must be positive");
  auto d = [](std::size_t v) { return static_cast<double>(v); };
  FlopBreakdown out;

  const auto& ve = cfg.visual_encoder;
  const double pixels = d(ve.image_height) * d(ve.image_width);
  const double taps = d(ve.kernel * ve.kernel);
  out.visual_encoder = d(t_v) * pixels * taps * (3.0 * d(ve.hidden_channels) + d(ve.hidden_channels * ve.out_channels));

  const double v = d(cfg.node_count());
  const std::size_t f = cfg.node_feature_width();
  const std::size_t cg = cfg.gcn.out_channels(), cf = cfg.refinement.fused_channels;
  const std::size_t k = cfg.num_classes;

  // Graph conv: node mixing on the narrower side plus the channel projection.
  auto gconv = [&](double frames, std::size_t c_in, std::size_t c_out) {
    return frames * (v * v * d(std::min(c_in, c_out)) + v * d(c_in) * d(c_out));
  };
  std::size_t c_in = cfg.fusion == FusionStrategy::kEarly ? f + cfg.visual_channels : f;
  double frames = d(t_m);
  for (std::size_t i = 0; i < cfg.gcn.stages(); ++i) {
    const std::size_t w = cfg.gcn.channels[i];
    out.gcn += gconv(frames, c_in, w);
    frames /= 2.0;
    out.gcn += frames * v * d(cfg.gcn.temporal_kernel) * d(w) * d(w);
    c_in = w;
  }
  for (std::size_t i = cfg.gcn.stages(); i-- > 0;) {
    frames *= 2.0;
    out.gcn += gconv(frames, c_in, cfg.gcn.channels[i]);
    c_in = cfg.gcn.channels[i];
  }

  auto head = [&](std::size_t c) {
    return d(t_m) * (d(cfg.classifier_kernel) * d(c) * d(c / 2) + d(c / 2) * d(k));
  };
  if (cfg.fusion != FusionStrategy::kEarly) {
    out.refinement = d(t_v) * d(f + cfg.visual_channels) * d(cf);
    if (cfg.refinement.enabled) out.refinement += d(cfg.refinement.bottleneck_count) * d(t_v) * d(cf) * d(cf);
  }
  switch (cfg.fusion) {
    case FusionStrategy::kEarly:
      out.classifier = head(cg);
      break;
    case FusionStrategy::kMid:
      out.classifier = head(cg + cf);
      break;
    case FusionStrategy::kLate:
      out.classifier = head(cg) + head(cf);
      break;
    case FusionStrategy::kMidLate:
      out.classifier = head(cg + cf) + head(cf);
      break;
  }
  return out;
}

}  // namespace mmgcn
