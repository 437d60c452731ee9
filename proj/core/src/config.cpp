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

#include "mmgcn/config.hpp"

#include <set>

#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"

namespace mmgcn {

using nlohmann::json;

namespace {

// Reads known keys from one JSON object and rejects the rest on finish().
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) throw ConfigError(where(key) + ": expected a non-negative integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(path_ + ": unknown key '" + k + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* to_string(SmoothingKind k) {
  switch (k) {
    case SmoothingKind::kOriginal:
      return "original";
    case SmoothingKind::kLinear:
      return "linear";
    case SmoothingKind::kGaussian:
      return "gaussian";
  }
  return "?";
}

SmoothingKind smoothing_from_string(const std::string& s, const std::string& where) {
  if (s == "original" || s == "O") return SmoothingKind::kOriginal;
  if (s == "linear" || s == "L") return SmoothingKind::kLinear;
  if (s == "gaussian" || s == "G") return SmoothingKind::kGaussian;
  throw ConfigError(where + ": unknown smoothing kind '" + s + "'");
}

json skeleton_json(const SkeletonDef& s) {
  json edges = json::array();
  for (const auto& [a, b] : s.edges) edges.push_back({a, b});
  return {{"joint_count", s.joint_count}, {"edges", edges}, {"hand_joint_indices", s.hand_joint_indices}};
}

SkeletonDef skeleton_from_json(const json& j, SkeletonDef s, const std::string& path) {
  Reader r(j, path);
  r.get("joint_count", s.joint_count);
  if (const json* e = r.sub("edges")) {
    s.edges.clear();
    try {
      for (const auto& pair : *e) s.edges.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>());
    } catch (const json::exception& ex) {
      throw ConfigError(path + ".edges: " + ex.what());
    }
  }
  r.get("hand_joint_indices", s.hand_joint_indices);
  r.finish();
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig RunConfig::desk_default() {
  RunConfig c;
  c.train.learning_rate = 0.05;
  c.train.momentum = 0.9;
  c.train.grad_clip = 1.0;
  c.train.batch_size = 8;
  c.train.epochs = 200;
  c.train.milestones = {120, 170};
  c.train.decay_factor = 0.1;
  c.train.seed = c.seed;
  c.synthetic.seed = c.seed;
  return c;
}

json to_json(const ModelConfig& c) {
  return {{"encoding", {{"alpha", c.encoding.alpha}, {"beta", c.encoding.beta}, {"dims_per_coord", c.encoding.dims_per_coord}}},
          {"use_sinusoidal", c.use_sinusoidal},
          {"gcn",
           {{"channels", c.gcn.channels},
            {"temporal_kernel", c.gcn.temporal_kernel},
            {"skip_connections", c.gcn.skip_connections}}},
          {"refinement",
           {{"enabled", c.refinement.enabled},
            {"bottleneck_count", c.refinement.bottleneck_count},
            {"pyramid_bins", c.refinement.pyramid_bins},
            {"fused_channels", c.refinement.fused_channels}}},
          {"visual_encoder",
           {{"hidden_channels", c.visual_encoder.hidden_channels},
            {"out_channels", c.visual_encoder.out_channels},
            {"kernel", c.visual_encoder.kernel},
            {"image_height", c.visual_encoder.image_height},
            {"image_width", c.visual_encoder.image_width}}},
          {"fusion", to_string(c.fusion)},
          {"num_classes", c.num_classes},
          {"classifier_kernel", c.classifier_kernel},
          {"skeleton", skeleton_json(c.skeleton)},
          {"object_count", c.object_count},
          {"motion_frames", c.motion_frames},
          {"visual_frames", c.visual_frames},
          {"visual_channels", c.visual_channels}};
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"weight_decay", c.weight_decay},
          {"grad_clip", c.grad_clip},
          {"milestones", c.milestones},
          {"decay_factor", c.decay_factor},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"smoothing",
           {{"kind", to_string(c.smoothing.kind)},
            {"window", c.smoothing.window},
            {"sigma", c.smoothing.sigma},
            {"radius", c.smoothing.radius}}},
          {"mixing", {{"enabled", c.mixing.enabled}, {"beta_alpha", c.mixing.beta_alpha}}},
          {"target_accuracy", c.target_accuracy},
          {"eval_every", c.eval_every}};
}

json to_json(const SyntheticConfig& c) {
  return {{"sequence_count", c.sequence_count}, {"motion_frames", c.motion_frames},
          {"visual_frames", c.visual_frames},   {"object_count", c.object_count},
          {"num_classes", c.num_classes},       {"visual_channels", c.visual_channels},
          {"min_segment", c.min_segment},       {"max_segment", c.max_segment},
          {"transition", c.transition},         {"position_noise", c.position_noise},
          {"visual_noise", c.visual_noise}};
}

json to_json(const RunConfig& c) {
  return {{"model", to_json(c.model)},   {"train", to_json(c.train)},       {"synthetic", to_json(c.synthetic)},
          {"data_dir", c.data_dir},      {"output_dir", c.output_dir},      {"seed", c.seed}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig c) {
  Reader r(j, "model");
  if (const json* e = r.sub("encoding")) {
    Reader er(*e, "model.encoding");
    er.get("alpha", c.encoding.alpha);
    er.get("beta", c.encoding.beta);
    er.get("dims_per_coord", c.encoding.dims_per_coord);
    er.finish();
  }
  r.get("use_sinusoidal", c.use_sinusoidal);
  if (const json* g = r.sub("gcn")) {
    Reader gr(*g, "model.gcn");
    gr.get("channels", c.gcn.channels);
    gr.get("temporal_kernel", c.gcn.temporal_kernel);
    gr.get("skip_connections", c.gcn.skip_connections);
    gr.finish();
  }
  if (const json* f = r.sub("refinement")) {
    Reader fr(*f, "model.refinement");
    fr.get("enabled", c.refinement.enabled);
    fr.get("bottleneck_count", c.refinement.bottleneck_count);
    fr.get("pyramid_bins", c.refinement.pyramid_bins);
    fr.get("fused_channels", c.refinement.fused_channels);
    fr.finish();
  }
  if (const json* v = r.sub("visual_encoder")) {
    Reader vr(*v, "model.visual_encoder");
    vr.get("hidden_channels", c.visual_encoder.hidden_channels);
    vr.get("out_channels", c.visual_encoder.out_channels);
    vr.get("kernel", c.visual_encoder.kernel);
    vr.get("image_height", c.visual_encoder.image_height);
    vr.get("image_width", c.visual_encoder.image_width);
    vr.finish();
  }
  std::string fusion = to_string(c.fusion);
  r.get("fusion", fusion);
  try {
    c.fusion = fusion_from_string(fusion);
  } catch (const ValueError& e) {
    throw ConfigError(std::string("model.fusion: ") + e.what());
  }
  r.get("num_classes", c.num_classes);
  r.get("classifier_kernel", c.classifier_kernel);
  if (const json* s = r.sub("skeleton")) c.skeleton = skeleton_from_json(*s, c.skeleton, "model.skeleton");
  r.get("object_count", c.object_count);
  r.get("motion_frames", c.motion_frames);
  r.get("visual_frames", c.visual_frames);
  r.get("visual_channels", c.visual_channels);
  r.finish();
  try {
    c.validate();
  } catch (const ValueError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  return c;
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  Reader r(j, "train");
  r.get("learning_rate", c.learning_rate);
  r.get("momentum", c.momentum);
  r.get("weight_decay", c.weight_decay);
  r.get("grad_clip", c.grad_clip);
  r.get("milestones", c.milestones);
  r.get("decay_factor", c.decay_factor);
  r.get("batch_size", c.batch_size);
  r.get("epochs", c.epochs);
  if (const json* s = r.sub("smoothing")) {
    Reader sr(*s, "train.smoothing");
    std::string kind = to_string(c.smoothing.kind);
    sr.get("kind", kind);
    c.smoothing.kind = smoothing_from_string(kind, "train.smoothing.kind");
    sr.get("window", c.smoothing.window);
    sr.get("sigma", c.smoothing.sigma);
    sr.get("radius", c.smoothing.radius);
    sr.finish();
  }
  if (const json* m = r.sub("mixing")) {
    Reader mr(*m, "train.mixing");
    mr.get("enabled", c.mixing.enabled);
    mr.get("beta_alpha", c.mixing.beta_alpha);
    mr.finish();
  }
  r.get("target_accuracy", c.target_accuracy);
  r.get("eval_every", c.eval_every);
  r.finish();
  try {
    c.validate();
  } catch (const ValueError& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  return c;
}

SyntheticConfig synthetic_config_from_json(const json& j, SyntheticConfig c) {
  Reader r(j, "synthetic");
  r.get("sequence_count", c.sequence_count);
  r.get("motion_frames", c.motion_frames);
  r.get("visual_frames", c.visual_frames);
  r.get("object_count", c.object_count);
  r.get("num_classes", c.num_classes);
  r.get("visual_channels", c.visual_channels);
  r.get("min_segment", c.min_segment);
  r.get("max_segment", c.max_segment);
  r.get("transition", c.transition);
  r.get("position_noise", c.position_noise);
  r.get("visual_noise", c.visual_noise);
  r.finish();
  try {
    c.validate();
  } catch (const ValueError& e) {
    throw ConfigError(std::string("synthetic: ") + e.what());
  }
  return c;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  Reader r(j, "config");
  if (const json* m = r.sub("model")) c.model = model_config_from_json(*m, c.model);
  if (const json* t = r.sub("train")) c.train = train_config_from_json(*t, c.train);
  if (const json* s = r.sub("synthetic")) c.synthetic = synthetic_config_from_json(*s, c.synthetic);
  r.get("data_dir", c.data_dir);
  r.get("output_dir", c.output_dir);
  r.get("seed", c.seed);
  r.finish();
  c.train.seed = c.seed;
  c.synthetic.seed = c.seed;
  return c;
}

RunConfig load_run_config(const std::string& path_or_default) {
  if (path_or_default == "default") return RunConfig::desk_default();
  const std::string text = read_file(path_or_default);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path_or_default + ": invalid JSON (" + e.what() + ")");
  }
  return run_config_from_json(j);
}

std::string config_digest(const json& j) { return sha256_hex(j.dump()); }

}  // namespace mmgcn
