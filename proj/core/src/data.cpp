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

#include "mmgcn/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"

namespace mmgcn {

namespace fs = std::filesystem;
using nlohmann::json;

void MotionSequence::validate() const {
  if (positions.size() != frames * nodes * 3 || valid.size() != frames * nodes) {
    throw DataError("motion sequence buffers do not match [" + std::to_string(frames) + "," +
                    std::to_string(nodes) + "]");
  }
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (valid[i] > 1) throw DataError("validity flags must be 0 or 1");
    if (!valid[i] && (positions[3 * i] != 0.0 || positions[3 * i + 1] != 0.0 || positions[3 * i + 2] != 0.0)) {
      throw DataError("masked node carries a non-zero position at frame " + std::to_string(i / nodes) + ", node " +
                      std::to_string(i % nodes));
    }
  }
}

void DatasetMeta::validate() const {
  if (motion_frames == 0 || visual_frames == 0) throw DataError("meta: frame counts must be positive");
  if (motion_frames % visual_frames != 0) {
    throw DataError("meta: motion_frames " + std::to_string(motion_frames) + " is not divisible by visual_frames " +
                    std::to_string(visual_frames));
  }
  if (num_classes < 2) throw DataError("meta: need at least two classes");
  if (!class_names.empty() && class_names.size() != num_classes) {
    throw DataError("meta: class_names has " + std::to_string(class_names.size()) + " entries for " +
                    std::to_string(num_classes) + " classes");
  }
  if (visual_channels == 0) throw DataError("meta: visual_channels must be positive");
  if (skeleton.joint_count != joint_count) throw DataError("meta: skeleton joint count disagrees with joint_count");
  try {
    skeleton.validate();
  } catch (const ValueError& e) {
    throw DataError(std::string("meta: ") + e.what());
  }
}

Tensor Dataset::visual_tensor(std::size_t index) const {
  return Tensor::from_data({meta.visual_frames, meta.visual_channels}, sequences.at(index).visual);
}

std::pair<Dataset, Dataset> Dataset::split(std::size_t count) const {
  if (count > sequences.size()) throw ValueError("split point beyond dataset size");
  Dataset head{meta, {sequences.begin(), sequences.begin() + static_cast<std::ptrdiff_t>(count)}};
  Dataset tail{meta, {sequences.begin() + static_cast<std::ptrdiff_t>(count), sequences.end()}};
  head.meta.sequence_count = head.sequences.size();
  tail.meta.sequence_count = tail.sequences.size();
  return {std::move(head), std::move(tail)};
}

// ---------------------------------------------------------------------------
// Synthetic generation

void SyntheticConfig::validate() const {
  if (num_classes < 2) throw ValueError("synthetic: need at least two classes");
  if (visual_frames == 0 || motion_frames % visual_frames != 0) {
    throw ValueError("synthetic: motion_frames must be a positive multiple of visual_frames");
  }
  if (min_segment == 0 || min_segment > max_segment) throw ValueError("synthetic: need 0 < min_segment <= max_segment");
  if (transition > min_segment) throw ValueError("synthetic: transition longer than the minimum segment");
  if (motion_frames < min_segment) throw ValueError("synthetic: sequence shorter than one segment");
  if (visual_channels == 0) throw ValueError("synthetic: visual_channels must be positive");
  if (position_noise < 0.0 || visual_noise < 0.0) throw ValueError("synthetic: noise levels must be non-negative");
}

namespace {

constexpr double kFps = 30.0;

struct ClassMotion {
  // Per joint and axis.
  std::vector<std::array<double, 3>> offset, amplitude, phase;
  double frequency = 1.0;           // Hz
  std::vector<int> attached_hand;   // per object: -1 resting, else index into hand joints
};

std::vector<std::array<double, 3>> rest_pose() {
  return {{0.00, -0.30, 1.50}, {0.00, 0.00, 1.50},  {0.00, 0.25, 1.50},   {0.00, 0.40, 1.50},
          {-0.20, 0.22, 1.50}, {-0.30, 0.00, 1.45}, {-0.25, -0.15, 1.35}, {0.20, 0.22, 1.50},
          {0.30, 0.00, 1.45},  {0.25, -0.15, 1.35}};
}

struct Generator {
  const SyntheticConfig& cfg;
  SkeletonDef skeleton = SkeletonDef::upper_body();
  std::vector<std::array<double, 3>> rest = rest_pose();
  std::vector<ClassMotion> classes;
  std::vector<std::array<double, 3>> object_rest;
  std::vector<std::vector<double>> prototypes;

  explicit Generator(const SyntheticConfig& c) : cfg(c) {
    std::mt19937_64 rng(derive_seed(cfg.seed, 0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t joints = skeleton.joint_count;
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
      ClassMotion m;
      m.frequency = 0.4 + 0.35 * static_cast<double>(c);
      m.offset.resize(joints);
      m.amplitude.resize(joints);
      m.phase.resize(joints);
      for (std::size_t j = 0; j < joints; ++j) {
        const bool arm = j >= 4;
        for (std::size_t a = 0; a < 3; ++a) {
          m.offset[j][a] = (arm ? 0.10 : 0.02) * (2.0 * unit(rng) - 1.0);
          m.amplitude[j][a] = (arm ? 0.08 : 0.015) * unit(rng);
          m.phase[j][a] = 2.0 * std::numbers::pi * unit(rng);
        }
      }
      std::uniform_int_distribution<int> hand(-1, static_cast<int>(skeleton.hand_joint_indices.size()) - 1);
      for (std::size_t o = 0; o < cfg.object_count; ++o) m.attached_hand.push_back(hand(rng));
      classes.push_back(std::move(m));
    }
    for (std::size_t o = 0; o < cfg.object_count; ++o) {
      object_rest.push_back({-0.3 + 0.6 * unit(rng), -0.35 + 0.1 * unit(rng), 1.2 + 0.2 * unit(rng)});
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
      std::vector<double> p(cfg.visual_channels);
      for (auto& v : p) v = normal(rng);
      prototypes.push_back(std::move(p));
    }
  }

  std::size_t nodes() const { return skeleton.joint_count + cfg.object_count; }

  // Noise-free positions of every node at frame t when performing class c.
  std::vector<double> pose(std::size_t c, std::size_t t) const {
    const ClassMotion& m = classes[c];
    const std::size_t joints = skeleton.joint_count;
    std::vector<double> out(nodes() * 3);
    const double time = static_cast<double>(t) / kFps;
    for (std::size_t j = 0; j < joints; ++j) {
      for (std::size_t a = 0; a < 3; ++a) {
        out[j * 3 + a] = rest[j][a] + m.offset[j][a] +
                         m.amplitude[j][a] * std::sin(2.0 * std::numbers::pi * m.frequency * time + m.phase[j][a]);
      }
    }
    for (std::size_t o = 0; o < cfg.object_count; ++o) {
      for (std::size_t a = 0; a < 3; ++a) {
        double v = object_rest[o][a];
        if (m.attached_hand[o] >= 0) {
          const std::size_t h = skeleton.hand_joint_indices[static_cast<std::size_t>(m.attached_hand[o])];
          v = out[h * 3 + a] + (a == 2 ? -0.03 : 0.02);
        }
        out[(joints + o) * 3 + a] = v;
      }
    }
    return out;
  }

  Sequence sequence(std::size_t index) const {
    std::mt19937_64 rng(derive_seed(cfg.seed, index + 1));
    const std::size_t frames = cfg.motion_frames;

    // Segment lengths: every segment, including the last, spans >= min_segment frames.
    std::vector<std::size_t> lengths;
    std::size_t remaining = frames;
    while (remaining > 0) {
      std::size_t len = remaining;
      if (remaining >= 2 * cfg.min_segment) {
        std::uniform_int_distribution<std::size_t> d(cfg.min_segment, std::min(cfg.max_segment, remaining - cfg.min_segment));
        len = d(rng);
      }
      lengths.push_back(len);
      remaining -= len;
    }
    std::vector<std::size_t> classes_seq;
    std::uniform_int_distribution<std::size_t> first(0, cfg.num_classes - 1);
    std::uniform_int_distribution<std::size_t> step(1, cfg.num_classes - 1);
    classes_seq.push_back(first(rng));
    for (std::size_t s = 1; s < lengths.size(); ++s) {
      classes_seq.push_back((classes_seq.back() + step(rng)) % cfg.num_classes);
    }

    Sequence seq;
    seq.labels.resize(frames);
    std::vector<std::size_t> bounds{0};
    for (std::size_t s = 0; s < lengths.size(); ++s) {
      for (std::size_t t = bounds.back(); t < bounds.back() + lengths[s]; ++t) seq.labels[t] = static_cast<int>(classes_seq[s]);
      bounds.push_back(bounds.back() + lengths[s]);
    }

    MotionSequence& m = seq.motion;
    m.frames = frames;
    m.nodes = nodes();
    m.object_count = cfg.object_count;
    m.positions.assign(frames * m.nodes * 3, 0.0);
    m.valid.assign(frames * m.nodes, 1);
    std::normal_distribution<double> jitter(0.0, cfg.position_noise);
    const double half = static_cast<double>(cfg.transition) / 2.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t s = static_cast<std::size_t>(
          std::upper_bound(bounds.begin(), bounds.end(), t) - bounds.begin() - 1);
      std::vector<double> p = pose(classes_seq[s], t);
      // Blend with the neighbouring action inside the transition window around a boundary.
      const double ft = static_cast<double>(t) + 0.5;
      if (cfg.transition > 0) {
        if (s + 1 < lengths.size() && ft > static_cast<double>(bounds[s + 1]) - half) {
          const double w = (ft - (static_cast<double>(bounds[s + 1]) - half)) / static_cast<double>(cfg.transition);
          auto q = pose(classes_seq[s + 1], t);
          for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - w) * p[i] + w * q[i];
        } else if (s > 0 && ft < static_cast<double>(bounds[s]) + half) {
          const double w = (ft - (static_cast<double>(bounds[s]) - half)) / static_cast<double>(cfg.transition);
          auto q = pose(classes_seq[s - 1], t);
          for (std::size_t i = 0; i < p.size(); ++i) p[i] = w * p[i] + (1.0 - w) * q[i];
        }
      }
      for (std::size_t i = 0; i < p.size(); ++i) m.positions[t * m.nodes * 3 + i] = p[i] + jitter(rng);
    }

    const std::size_t ratio = frames / cfg.visual_frames;
    std::normal_distribution<double> vnoise(0.0, cfg.visual_noise);
    seq.visual.resize(cfg.visual_frames * cfg.visual_channels);
    for (std::size_t f = 0; f < cfg.visual_frames; ++f) {
      const auto& proto = prototypes[static_cast<std::size_t>(seq.labels[f * ratio + ratio / 2])];
      for (std::size_t c = 0; c < cfg.visual_channels; ++c) seq.visual[f * cfg.visual_channels + c] = proto[c] + vnoise(rng);
    }
    return seq;
  }
};

std::vector<std::string> default_class_names(std::size_t k) {
  static const std::vector<std::string> kNames{"reach", "grasp", "pour", "stir", "place"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(i < kNames.size() ? kNames[i] : "action_" + std::to_string(i));
  return out;
}

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Generator gen(cfg);
  Dataset ds;
  ds.meta.sequence_count = cfg.sequence_count;
  ds.meta.motion_frames = cfg.motion_frames;
  ds.meta.visual_frames = cfg.visual_frames;
  ds.meta.joint_count = gen.skeleton.joint_count;
  ds.meta.object_count = cfg.object_count;
  ds.meta.num_classes = cfg.num_classes;
  ds.meta.class_names = default_class_names(cfg.num_classes);
  ds.meta.visual_channels = cfg.visual_channels;
  ds.meta.skeleton = gen.skeleton;
  ds.sequences.reserve(cfg.sequence_count);
  for (std::size_t i = 0; i < cfg.sequence_count; ++i) ds.sequences.push_back(gen.sequence(i));
  return ds;
}

// ---------------------------------------------------------------------------
// Disk format

namespace {

json meta_to_json(const DatasetMeta& m) {
  json edges = json::array();
  for (const auto& [a, b] : m.skeleton.edges) edges.push_back({a, b});
  return json{{"format_version", 1},
              {"sequence_count", m.sequence_count},
              {"motion_frames", m.motion_frames},
              {"visual_frames", m.visual_frames},
              {"joint_count", m.joint_count},
              {"object_count", m.object_count},
              {"num_classes", m.num_classes},
              {"class_names", m.class_names},
              {"visual_channels", m.visual_channels},
              {"skeleton",
               {{"joint_count", m.skeleton.joint_count},
                {"edges", edges},
                {"hand_joint_indices", m.skeleton.hand_joint_indices}}}};
}

DatasetMeta meta_from_json(const json& j) {
  DatasetMeta m;
  m.sequence_count = j.at("sequence_count").get<std::size_t>();
  m.motion_frames = j.at("motion_frames").get<std::size_t>();
  m.visual_frames = j.at("visual_frames").get<std::size_t>();
  m.joint_count = j.at("joint_count").get<std::size_t>();
  m.object_count = j.at("object_count").get<std::size_t>();
  m.num_classes = j.at("num_classes").get<std::size_t>();
  m.class_names = j.value("class_names", std::vector<std::string>{});
  m.visual_channels = j.at("visual_channels").get<std::size_t>();
  const json& s = j.at("skeleton");
  m.skeleton.joint_count = s.at("joint_count").get<std::size_t>();
  for (const auto& e : s.at("edges")) m.skeleton.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
  m.skeleton.hand_joint_indices = s.at("hand_joint_indices").get<std::vector<std::size_t>>();
  return m;
}

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  return std::string(stem) + "_" + std::to_string(i) + ext;
}

std::string encode_bits(const std::vector<std::uint8_t>& flags) {
  std::string out((flags.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) out[i / 8] = static_cast<char>(static_cast<unsigned char>(out[i / 8]) | (1u << (i % 8)));
  }
  return out;
}

std::string encode_labels(const std::vector<int>& labels) {
  std::string out = "frame,class_id\n";
  for (std::size_t t = 0; t < labels.size(); ++t) out += std::to_string(t) + "," + std::to_string(labels[t]) + "\n";
  return out;
}

std::vector<int> parse_labels(const fs::path& path, std::size_t frames, std::size_t num_classes) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "frame,class_id") throw DataError(path.filename().string() + ": bad header");
  std::vector<int> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    long frame = -1;
    int cls = -1;
    const char* end = line.data() + line.size();
    if (comma == std::string::npos ||
        std::from_chars(line.data(), line.data() + comma, frame).ec != std::errc{} ||
        std::from_chars(line.data() + comma + 1, end, cls).ec != std::errc{}) {
      throw DataError(path.filename().string() + ": malformed row '" + line + "'");
    }
    if (frame != static_cast<long>(labels.size())) throw DataError(path.filename().string() + ": frames out of order");
    if (cls < 0 || static_cast<std::size_t>(cls) >= num_classes) {
      throw DataError(path.filename().string() + ": class id " + std::to_string(cls) + " out of range");
    }
    labels.push_back(cls);
  }
  if (labels.size() != frames) {
    throw DataError(path.filename().string() + ": shape mismatch, expected " + std::to_string(frames) + " rows, found " +
                    std::to_string(labels.size()));
  }
  return labels;
}

}  // namespace

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  dataset.meta.validate();
  if (dataset.sequences.size() != dataset.meta.sequence_count) throw DataError("sequence count disagrees with meta");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / "meta.json", meta_to_json(dataset.meta).dump(2) + "\n");
  for (std::size_t i = 0; i < dataset.sequences.size(); ++i) {
    const Sequence& s = dataset.sequences[i];
    s.motion.validate();
    write_f64_file(dir / indexed("motion", i, ".f64"), s.motion.positions);
    write_file_atomic(dir / indexed("valid", i, ".bits"), encode_bits(s.motion.valid));
    write_f64_file(dir / indexed("visual", i, ".f64"), s.visual);
    write_file_atomic(dir / indexed("labels", i, ".csv"), encode_labels(s.labels));
  }
}

Dataset load_dataset(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  if (!fs::exists(meta_path)) throw IoError("missing " + meta_path.string());
  Dataset ds;
  try {
    ds.meta = meta_from_json(json::parse(read_file(meta_path)));
  } catch (const json::exception& e) {
    throw DataError("meta.json: corrupt header (" + std::string(e.what()) + ")");
  }
  ds.meta.validate();
  const DatasetMeta& m = ds.meta;
  const std::size_t v = m.node_count();
  for (std::size_t i = 0; i < m.sequence_count; ++i) {
    Sequence s;
    s.motion.frames = m.motion_frames;
    s.motion.nodes = v;
    s.motion.object_count = m.object_count;
    s.motion.positions = read_f64_file(dir / indexed("motion", i, ".f64"), m.motion_frames * v * 3);
    const fs::path bits_path = dir / indexed("valid", i, ".bits");
    const std::string bits = read_file(bits_path);
    const std::size_t cells = m.motion_frames * v;
    if (bits.size() != (cells + 7) / 8) {
      throw DataError(bits_path.filename().string() + ": shape mismatch, expected " + std::to_string((cells + 7) / 8) +
                      " bytes, found " + std::to_string(bits.size()));
    }
    s.motion.valid.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) s.motion.valid[c] = (static_cast<unsigned char>(bits[c / 8]) >> (c % 8)) & 1u;
    s.motion.validate();
    s.visual = read_f64_file(dir / indexed("visual", i, ".f64"), m.visual_frames * m.visual_channels);
    s.labels = parse_labels(dir / indexed("labels", i, ".csv"), m.motion_frames, m.num_classes);
    ds.sequences.push_back(std::move(s));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Noise

MotionSequence inject_node_dropout(const MotionSequence& motion, const NoiseConfig& cfg) {
  if (!(cfg.node_drop_rate >= 0.0 && cfg.node_drop_rate <= 1.0)) {
    throw ValueError("node drop rate must lie in [0, 1], got " + std::to_string(cfg.node_drop_rate));
  }
  MotionSequence out = motion;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t cell = 0; cell < out.valid.size(); ++cell) {
    if (unit(rng) < cfg.node_drop_rate) {
      out.valid[cell] = 0;
      out.positions[3 * cell] = out.positions[3 * cell + 1] = out.positions[3 * cell + 2] = 0.0;
    }
  }
  return out;
}

Dataset inject_node_dropout(const Dataset& dataset, const NoiseConfig& cfg) {
  Dataset out = dataset;
  for (std::size_t i = 0; i < out.sequences.size(); ++i) {
    out.sequences[i].motion = inject_node_dropout(dataset.sequences[i].motion, {cfg.node_drop_rate, derive_seed(cfg.seed, i)});
  }
  return out;
}

}  // namespace mmgcn
