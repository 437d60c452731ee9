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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "mmgcn/data.hpp"
#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"
#include "mmgcn/metrics.hpp"

using namespace mmgcn;
using mmgcn::testing::TempDir;

namespace {

SyntheticConfig small_config(std::uint64_t seed = 3) {
  SyntheticConfig cfg;
  cfg.sequence_count = 4;
  cfg.seed = seed;
  return cfg;
}

void check_mask_convention(const MotionSequence& m) {
  for (std::size_t t = 0; t < m.frames; ++t)
    for (std::size_t v = 0; v < m.nodes; ++v)
      if (!m.is_valid(t, v)) {
        for (std::size_t a = 0; a < 3; ++a) REQUIRE(m.position(t, v, a) == 0.0);
      }
}

}  // namespace

TEST_SUITE("data.synthetic") {
  TEST_CASE("shapes follow the config") {
    const auto ds = generate_synthetic(small_config());
    CHECK(ds.meta.sequence_count == 4);
    CHECK(ds.meta.node_count() == 12);
    CHECK_NOTHROW(ds.meta.validate());
    REQUIRE(ds.sequences.size() == 4);
    for (const auto& s : ds.sequences) {
      CHECK_NOTHROW(s.motion.validate());
      CHECK(s.motion.frames == 120);
      CHECK(s.motion.nodes == 12);
      CHECK(s.labels.size() == 120);
      CHECK(s.visual.size() == 4 * 16);
      for (int l : s.labels) CHECK((l >= 0 && l < 5));
    }
    CHECK(ds.visual_tensor(1).shape() == Shape{4, 16});
  }

  TEST_CASE("same seed gives identical bytes") {
    TempDir a("gen_a"), b("gen_b");
    save_dataset(generate_synthetic(small_config(11)), a.path());
    save_dataset(generate_synthetic(small_config(11)), b.path());
    for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
      CHECK(read_file(entry.path()) == read_file(b.path() / entry.path().filename()));
    }
    CHECK_FALSE(generate_synthetic(small_config(11)) == generate_synthetic(small_config(12)));
  }

  TEST_CASE("segments respect the minimum length") {
    SyntheticConfig cfg = small_config();
    cfg.sequence_count = 50;
    cfg.min_segment = 15;
    cfg.max_segment = 40;
    cfg.transition = 4;
    for (const auto& s : generate_synthetic(cfg).sequences) {
      for (const auto& seg : extract_segments(s.labels)) CHECK(seg.length() >= 15);
    }
  }

  TEST_CASE("class frequencies are near uniform") {
    SyntheticConfig cfg = small_config(5);
    cfg.sequence_count = 84;  // 10080 frames
    std::vector<double> freq(cfg.num_classes, 0.0);
    std::size_t frames = 0;
    for (const auto& s : generate_synthetic(cfg).sequences) {
      for (int l : s.labels) freq[static_cast<std::size_t>(l)] += 1.0;
      frames += s.labels.size();
    }
    for (double f : freq) CHECK(std::abs(f / static_cast<double>(frames) - 0.2) <= 0.05);
  }

  TEST_CASE("visual features follow the frame label") {
    SyntheticConfig cfg = small_config();
    cfg.visual_noise = 0.0;
    cfg.sequence_count = 12;
    const auto ds = generate_synthetic(cfg);
    std::map<int, std::vector<double>> proto;
    for (const auto& s : ds.sequences) {
      for (std::size_t f = 0; f < 4; ++f) {
        const int label = s.labels[f * 30 + 15];
        std::vector<double> row(s.visual.begin() + f * 16, s.visual.begin() + (f + 1) * 16);
        auto [it, fresh] = proto.emplace(label, row);
        if (!fresh) CHECK(it->second == row);
      }
    }
    CHECK(proto.size() >= 2);
  }

  TEST_CASE("invalid generator configs") {
    SyntheticConfig cfg;
    cfg.num_classes = 1;
    CHECK_THROWS_AS(generate_synthetic(cfg), ValueError);
    cfg = {};
    cfg.transition = cfg.min_segment + 1;
    CHECK_THROWS_AS(generate_synthetic(cfg), ValueError);
    cfg = {};
    cfg.visual_frames = 7;
    CHECK_THROWS_AS(generate_synthetic(cfg), ValueError);
  }
}

TEST_SUITE("data.format") {
  TEST_CASE("round trip is exact") {
    TempDir dir("roundtrip");
    auto ds = generate_synthetic(small_config());
    ds = inject_node_dropout(ds, {0.3, 1});
    save_dataset(ds, dir.path());
    CHECK(load_dataset(dir.path()) == ds);
  }

  TEST_CASE("layout and label header") {
    TempDir dir("layout");
    save_dataset(generate_synthetic(small_config()), dir.path());
    for (const char* name : {"meta.json", "motion_0.f64", "valid_0.bits", "visual_0.f64", "labels_0.csv"}) {
      CHECK(std::filesystem::exists(dir.path() / name));
    }
    CHECK(std::filesystem::file_size(dir.path() / "motion_0.f64") == 120 * 12 * 3 * 8);
    CHECK(std::filesystem::file_size(dir.path() / "valid_0.bits") == (120 * 12 + 7) / 8);
    CHECK(read_file(dir.path() / "labels_0.csv").rfind("frame,class_id\n", 0) == 0);
  }

  TEST_CASE("values are stored little-endian") {
    TempDir dir("endian");
    write_f64_file(dir.path() / "x.f64", std::vector<double>{1.0});
    const std::string bytes = read_file(dir.path() / "x.f64");
    REQUIRE(bytes.size() == 8);
    // 1.0 is 0x3FF0000000000000.
    CHECK(static_cast<unsigned char>(bytes[7]) == 0x3F);
    CHECK(static_cast<unsigned char>(bytes[6]) == 0xF0);
    for (int i = 0; i < 6; ++i) CHECK(bytes[i] == 0);
  }

  TEST_CASE("truncated motion file names the file") {
    TempDir dir("trunc");
    save_dataset(generate_synthetic(small_config()), dir.path());
    const auto path = dir.path() / "motion_2.f64";
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
    try {
      load_dataset(dir.path());
      FAIL("expected a DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("motion_2.f64") != std::string::npos);
    }
  }

  TEST_CASE("label file problems") {
    TempDir dir("labels");
    save_dataset(generate_synthetic(small_config()), dir.path());
    std::string text = read_file(dir.path() / "labels_1.csv");
    write_file_atomic(dir.path() / "labels_1.csv", text.substr(0, text.size() - 4));
    CHECK_THROWS_AS(load_dataset(dir.path()), DataError);
    write_file_atomic(dir.path() / "labels_1.csv", "frame;class\n");
    CHECK_THROWS_AS(load_dataset(dir.path()), DataError);
  }

  TEST_CASE("meta problems") {
    TempDir dir("meta");
    save_dataset(generate_synthetic(small_config()), dir.path());
    write_file_atomic(dir.path() / "meta.json", "{not json");
    CHECK_THROWS_AS(load_dataset(dir.path()), DataError);
    std::filesystem::remove(dir.path() / "meta.json");
    CHECK_THROWS_AS(load_dataset(dir.path()), IoError);

    DatasetMeta meta = generate_synthetic(small_config()).meta;
    meta.visual_frames = 7;
    CHECK_THROWS_AS(meta.validate(), DataError);
  }

  TEST_CASE("missing sequence file") {
    TempDir dir("missing");
    save_dataset(generate_synthetic(small_config()), dir.path());
    std::filesystem::remove(dir.path() / "visual_3.f64");
    CHECK_THROWS_AS(load_dataset(dir.path()), IoError);
  }

  TEST_CASE("masked node with a position is rejected") {
    auto m = generate_synthetic(small_config()).sequences[0].motion;
    m.valid[5] = 0;
    CHECK_THROWS_AS(m.validate(), DataError);
  }

  TEST_CASE("split keeps order and adjusts the count") {
    const auto ds = generate_synthetic(small_config());
    const auto [head, tail] = ds.split(3);
    CHECK(head.meta.sequence_count == 3);
    CHECK(tail.meta.sequence_count == 1);
    CHECK(tail.sequences[0] == ds.sequences[3]);
    CHECK_THROWS_AS(ds.split(5), ValueError);
  }
}

TEST_SUITE("data.dropout") {
  TEST_CASE("rate zero is the identity") {
    const auto m = generate_synthetic(small_config()).sequences[0].motion;
    CHECK(inject_node_dropout(m, {0.0, 9}) == m);
  }

  TEST_CASE("rate one removes everything") {
    const auto m = inject_node_dropout(generate_synthetic(small_config()).sequences[0].motion, {1.0, 9});
    for (double p : m.positions) CHECK(p == 0.0);
    for (auto v : m.valid) CHECK(v == 0);
  }

  TEST_CASE("dropped fraction at a quarter") {
    MotionSequence m;
    m.frames = 10000;
    m.nodes = 10;
    m.positions.assign(m.frames * m.nodes * 3, 0.5);
    m.valid.assign(m.frames * m.nodes, 1);
    const auto out = inject_node_dropout(m, {0.25, 123});
    const double dropped = static_cast<double>(std::count(out.valid.begin(), out.valid.end(), 0)) / 1e5;
    CHECK(std::abs(dropped - 0.25) <= 0.01);
    check_mask_convention(out);
  }

  TEST_CASE("input untouched and seeds deterministic") {
    const auto m = generate_synthetic(small_config()).sequences[1].motion;
    const auto copy = m;
    const auto a = inject_node_dropout(m, {0.2, 4}), b = inject_node_dropout(m, {0.2, 4});
    CHECK(m == copy);
    CHECK(a == b);
    CHECK_FALSE(a == inject_node_dropout(m, {0.2, 5}));
  }

  TEST_CASE("a second pass never restores a node") {
    const auto m = generate_synthetic(small_config()).sequences[2].motion;
    const auto once = inject_node_dropout(m, {0.3, 1});
    const auto twice = inject_node_dropout(once, {0.3, 2});
    for (std::size_t i = 0; i < once.valid.size(); ++i)
      if (!once.valid[i]) CHECK(twice.valid[i] == 0);
    check_mask_convention(twice);
  }

  TEST_CASE("dataset dropout uses distinct streams per sequence") {
    auto ds = generate_synthetic(small_config());
    const auto noisy = inject_node_dropout(ds, {0.5, 8});
    CHECK_FALSE(noisy.sequences[0].motion.valid == noisy.sequences[1].motion.valid);
    for (const auto& s : noisy.sequences) check_mask_convention(s.motion);
  }

  TEST_CASE("rate outside the unit interval") {
    const auto m = generate_synthetic(small_config()).sequences[0].motion;
    CHECK_THROWS_AS(inject_node_dropout(m, {-0.1, 0}), ValueError);
    CHECK_THROWS_AS(inject_node_dropout(m, {1.5, 0}), ValueError);
    CHECK_THROWS_AS(inject_node_dropout(m, {NAN, 0}), ValueError);
  }
}
