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
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "mmgcn/errors.hpp"
#include "mmgcn/graph.hpp"
#include "mmgcn/params.hpp"

using namespace mmgcn;
using mmgcn::testing::max_abs_diff;
using mmgcn::testing::random_tensor;
using mmgcn::testing::to_vec;

namespace {

// Cyclic Jacobi eigenvalue iteration for small symmetric matrices.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p * n + q]) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * a[p * n + q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i];
  return ev;
}

std::vector<double> random_adjacency(std::size_t v, std::mt19937_64& rng, double p = 0.4) {
  std::bernoulli_distribution edge(p);
  std::vector<double> a(v * v, 0.0);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j) a[i * v + j] = a[j * v + i] = edge(rng) ? 1.0 : 0.0;
  return a;
}

Graph graph_from_adjacency(std::vector<double> a, std::size_t v) {
  Graph g;
  g.node_count = v;
  g.adjacency = a;
  g.normalized = normalize_adjacency(Tensor::from_data({v, v}, std::move(a)));
  return g;
}

// Per frame (N ⊙ M) X W, written as plain loops.
std::vector<double> gconv_oracle(const Tensor& x, const Tensor& n, const Tensor& w, const Tensor& m) {
  const std::size_t t = x.dim(0), v = x.dim(1), ci = x.dim(2), co = w.dim(1);
  std::vector<double> y(t * v * co, 0.0);
  for (std::size_t f = 0; f < t; ++f)
    for (std::size_t a = 0; a < v; ++a)
      for (std::size_t b = 0; b < v; ++b) {
        const double nab = n.data()[a * v + b] * m.data()[a * v + b];
        for (std::size_t i = 0; i < ci; ++i)
          for (std::size_t o = 0; o < co; ++o)
            y[(f * v + a) * co + o] += nab * x.data()[(f * v + b) * ci + i] * w.data()[i * co + o];
      }
  return y;
}

}  // namespace

TEST_SUITE("graph.build") {
  TEST_CASE("three-joint chain") {
    SkeletonDef s{3, {{0, 1}, {1, 2}}, {}};
    const Graph g = build_graph(s, 0);
    CHECK(g.adjacency == std::vector<double>{0, 1, 0, 1, 0, 1, 0, 1, 0});
  }

  TEST_CASE("no objects keeps the skeleton adjacency") {
    const auto s = SkeletonDef::upper_body();
    const Graph g = build_graph(s, 0);
    CHECK(g.node_count == s.joint_count);
    std::size_t ones = 0;
    for (double v : g.adjacency) ones += v == 1.0 ? 1 : 0;
    CHECK(ones == 2 * s.edges.size());
    for (const auto& [a, b] : s.edges) CHECK(g.adj(a, b) == 1.0);
  }

  TEST_CASE("objects attach to every hand joint") {
    const auto s = SkeletonDef::upper_body();
    const Graph g = build_graph(s, 2);
    CHECK(g.node_count == s.joint_count + 2);
    for (std::size_t o = s.joint_count; o < g.node_count; ++o) {
      for (std::size_t j = 0; j < g.node_count; ++j) {
        const bool hand = std::find(s.hand_joint_indices.begin(), s.hand_joint_indices.end(), j) !=
                          s.hand_joint_indices.end();
        CHECK(g.adj(o, j) == (hand ? 1.0 : 0.0));
      }
    }
  }

  TEST_CASE("adjacency is symmetric") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
      SkeletonDef s;
      s.joint_count = 3 + rng() % 8;
      for (std::size_t i = 1; i < s.joint_count; ++i) s.edges.emplace_back(rng() % i, i);
      s.hand_joint_indices = {rng() % s.joint_count};
      const Graph g = build_graph(s, rng() % 3);
      for (std::size_t a = 0; a < g.node_count; ++a)
        for (std::size_t b = 0; b < g.node_count; ++b) CHECK(g.adj(a, b) == g.adj(b, a));
    }
  }

  TEST_CASE("invalid skeletons") {
    CHECK_THROWS_AS(build_graph(SkeletonDef{3, {{0, 1}}, {3}}, 1), ValueError);
    CHECK_THROWS_AS(build_graph(SkeletonDef{3, {{0, 5}}, {}}, 0), ValueError);
    CHECK_THROWS_AS(build_graph(SkeletonDef{3, {{1, 1}}, {}}, 0), ValueError);
    CHECK_NOTHROW(SkeletonDef::upper_body().validate());
  }
}

TEST_SUITE("graph.normalize") {
  TEST_CASE("edgeless graph normalizes to the identity") {
    const auto n = to_vec(normalize_adjacency(Tensor::zeros({4, 4})));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(n[i * 4 + j] == (i == j ? 1.0 : 0.0));
  }

  TEST_CASE("single edge") {
    for (double v : to_vec(normalize_adjacency(Tensor::from_data({2, 2}, {0, 1, 1, 0})))) {
      CHECK(std::abs(v - 0.5) <= 1e-15);
    }
  }

  TEST_CASE("matches the degree formula") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t v = 2 + rng() % 8;
      const auto a = random_adjacency(v, rng);
      const auto n = to_vec(normalize_adjacency(Tensor::from_data({v, v}, a)));
      std::vector<double> deg(v, 1.0);
      for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j) deg[i] += a[i * v + j];
      for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j) {
          const double aij = a[i * v + j] + (i == j ? 1.0 : 0.0);
          CHECK(std::abs(n[i * v + j] - aij / std::sqrt(deg[i] * deg[j])) <= 1e-15);
        }
    }
  }

  TEST_CASE("spectrum lies in [-1, 1]") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t v = 2 + rng() % 9;
      const auto n = to_vec(normalize_adjacency(Tensor::from_data({v, v}, random_adjacency(v, rng, 0.5))));
      for (double ev : symmetric_eigenvalues(n, v)) {
        CHECK(ev >= -1.0 - 1e-12);
        CHECK(ev <= 1.0 + 1e-12);
      }
    }
    // The eigen oracle itself: a 2-node complete graph has eigenvalues {0, 1}.
    auto ev = symmetric_eigenvalues({0.5, 0.5, 0.5, 0.5}, 2);
    std::sort(ev.begin(), ev.end());
    CHECK(std::abs(ev[0]) <= 1e-12);
    CHECK(std::abs(ev[1] - 1.0) <= 1e-12);
  }

  TEST_CASE("non-square input") { CHECK_THROWS_AS(normalize_adjacency(Tensor::zeros({2, 3})), ShapeError); }
}

TEST_SUITE("graph.spatial_conv") {
  TEST_CASE("identity propagation") {
    std::mt19937_64 rng(54);
    Tensor x = random_tensor({3, 4, 2}, rng, -1, 1, false);
    Tensor eye = normalize_adjacency(Tensor::zeros({4, 4}));
    Tensor w = Tensor::from_data({2, 2}, {1, 0, 0, 1});
    CHECK(to_vec(spatial_graph_conv(x, eye, w, Tensor::full({4, 4}, 1.0))) == to_vec(x));
  }

  TEST_CASE("zero input") {
    std::mt19937_64 rng(55);
    const Graph g = build_graph(SkeletonDef::upper_body(), 2);
    Tensor y = spatial_graph_conv(Tensor::zeros({4, 12, 3}), g.normalized, random_tensor({3, 5}, rng),
                                  Tensor::full({12, 12}, 1.0));
    for (double v : to_vec(y)) CHECK(v == 0.0);
  }

  TEST_CASE("random cases match the loop oracle") {
    std::mt19937_64 rng(56);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t t = 1 + rng() % 4, v = 2 + rng() % 5, ci = 1 + rng() % 4, co = 1 + rng() % 4;
      const Graph g = graph_from_adjacency(random_adjacency(v, rng), v);
      Tensor x = random_tensor({t, v, ci}, rng), w = random_tensor({ci, co}, rng), m = random_tensor({v, v}, rng);
      CHECK(max_abs_diff(spatial_graph_conv(x, g.normalized, w, m).data(), gconv_oracle(x, g.normalized, w, m)) <=
            1e-13);
    }
  }

  TEST_CASE("gradients on input, weights and mask") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t v = 3 + rng() % 3;
      const Graph g = graph_from_adjacency(random_adjacency(v, rng, 0.6), v);
      Tensor x = random_tensor({3, v, 3}, rng), w = random_tensor({3, 2}, rng), m = random_tensor({v, v}, rng);
      Tensor probe = random_tensor({3, v, 2}, rng, -1, 1, false);
      const double err =
          grad_check([&] { return sum(mul(spatial_graph_conv(x, g.normalized, w, m), probe)); }, {x, w, m});
      CHECK(err < 1e-4);
    }
  }

  TEST_CASE("shape mismatch") {
    const Graph g = build_graph(SkeletonDef{3, {{0, 1}}, {}}, 0);
    CHECK_THROWS_AS(spatial_graph_conv(Tensor::zeros({2, 4, 2}), g.normalized, Tensor::zeros({2, 2}),
                                       Tensor::full({3, 3}, 1.0)),
                    ShapeError);
    CHECK_THROWS_AS(spatial_graph_conv(Tensor::zeros({2, 3, 2}), g.normalized, Tensor::zeros({3, 2}),
                                       Tensor::full({3, 3}, 1.0)),
                    ShapeError);
  }
}

TEST_SUITE("graph.encoder_decoder") {
  TEST_CASE("output shape for two stages at T=120") {
    std::mt19937_64 rng(58);
    const Graph g = build_graph(SkeletonDef::upper_body(), 2);
    GcnStreamConfig cfg;
    ParameterSet params;
    init_gcn_stream(params, "g.", cfg, g.node_count, 48, rng);
    Bindings b(params, false);
    Tensor y = gcn_encoder_decoder(random_tensor({120, 12, 48}, rng, -1, 1, false), g, cfg, b, "g.");
    CHECK(y.shape() == Shape{120, cfg.out_channels()});
  }

  TEST_CASE("time-constant input gives time-constant output") {
    std::mt19937_64 rng(59);
    const Graph g = build_graph(SkeletonDef::upper_body(), 2);
    GcnStreamConfig cfg{{6, 8}, 3, true};
    ParameterSet params;
    init_gcn_stream(params, "", cfg, g.node_count, 4, rng);
    std::vector<double> row(4);
    for (auto& r : row) r = std::uniform_real_distribution<double>(-1, 1)(rng);
    std::vector<double> x;
    for (int i = 0; i < 16 * 12; ++i) x.insert(x.end(), row.begin(), row.end());
    Bindings b(params, false);
    const auto y = to_vec(gcn_encoder_decoder(Tensor::from_data({16, 12, 4}, x), g, cfg, b, ""));
    for (std::size_t t = 1; t < 16; ++t)
      for (std::size_t c = 0; c < 6; ++c) CHECK(std::abs(y[t * 6 + c] - y[c]) <= 1e-12);
  }

  TEST_CASE("tiny configuration passes grad_check") {
    std::mt19937_64 rng(60);
    const Graph g = build_graph(SkeletonDef{3, {{0, 1}, {1, 2}}, {2}}, 0);
    GcnStreamConfig cfg{{4, 6}, 3, true};
    ParameterSet params;
    init_gcn_stream(params, "", cfg, 3, 5, rng);
    Bindings b(params, true);
    Tensor x = random_tensor({8, 3, 5}, rng);
    Tensor probe = random_tensor({8, 4}, rng, -1, 1, false);
    auto fn = [&] { return sum(mul(gcn_encoder_decoder(x, g, cfg, b, ""), probe)); };
    fn();
    auto inputs = b.leaves();
    inputs.push_back(x);
    CHECK(grad_check(fn, inputs) < 1e-4);
  }

  TEST_CASE("indivisible length") {
    std::mt19937_64 rng(61);
    const Graph g = build_graph(SkeletonDef{2, {{0, 1}}, {}}, 0);
    GcnStreamConfig cfg{{2, 2}, 3, true};
    ParameterSet params;
    init_gcn_stream(params, "", cfg, 2, 1, rng);
    Bindings b(params, false);
    CHECK_THROWS_AS(gcn_encoder_decoder(Tensor::zeros({6, 2, 1}), g, cfg, b, ""), ShapeError);
  }

  TEST_CASE("node permutation commutes with the network") {
    std::mt19937_64 rng(62);
    const std::size_t v = 5;
    const auto a = random_adjacency(v, rng, 0.5);
    std::vector<std::size_t> perm(v);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pa(v * v);
    for (std::size_t i = 0; i < v; ++i)
      for (std::size_t j = 0; j < v; ++j) pa[perm[i] * v + perm[j]] = a[i * v + j];
    const Graph g = graph_from_adjacency(a, v), gp = graph_from_adjacency(pa, v);

    GcnStreamConfig cfg{{4, 6}, 3, true};
    ParameterSet params;
    init_gcn_stream(params, "", cfg, v, 3, rng);
    Tensor x = random_tensor({8, v, 3}, rng, -1, 1, false);
    std::vector<double> px(x.numel());
    for (std::size_t t = 0; t < 8; ++t)
      for (std::size_t i = 0; i < v; ++i)
        for (std::size_t c = 0; c < 3; ++c) px[(t * v + perm[i]) * 3 + c] = x.data()[(t * v + i) * 3 + c];

    Bindings b(params, false);
    const auto y = to_vec(gcn_encoder_decoder_nodes(x, g, cfg, b, ""));
    const auto yp = to_vec(gcn_encoder_decoder_nodes(Tensor::from_data({8, v, 3}, px), gp, cfg, b, ""));
    double worst = 0.0;
    for (std::size_t t = 0; t < 8; ++t)
      for (std::size_t i = 0; i < v; ++i)
        for (std::size_t c = 0; c < 4; ++c) {
          worst = std::max(worst, std::abs(y[(t * v + i) * 4 + c] - yp[(t * v + perm[i]) * 4 + c]));
        }
    CHECK(worst <= 1e-9);
    CHECK(max_abs_diff(gcn_encoder_decoder(x, g, cfg, b, "").data(),
                       gcn_encoder_decoder(Tensor::from_data({8, v, 3}, px), gp, cfg, b, "").data()) <= 1e-9);
  }

  TEST_CASE("zeroed decoder leaves only the first skip path") {
    std::mt19937_64 rng(63);
    const Graph g = build_graph(SkeletonDef::upper_body(), 2);
    GcnStreamConfig cfg{{6, 8}, 3, true};
    ParameterSet params;
    init_gcn_stream(params, "", cfg, g.node_count, 4, rng);
    params.fill_prefix("dec", 0.0);
    Tensor x = random_tensor({16, 12, 4}, rng, -1, 1, false);
    Bindings b(params, false);
    Tensor first = relu(spatial_graph_conv(x, g.normalized, b.get("enc0.gconv.weight"), b.get("enc0.gconv.mask")));
    CHECK(max_abs_diff(gcn_encoder_decoder(x, g, cfg, b, "").data(), mean(first, 1).data()) <= 1e-14);

    // Without skips the zeroed decoder silences the whole stream.
    GcnStreamConfig no_skip = cfg;
    no_skip.skip_connections = false;
    for (double v : to_vec(gcn_encoder_decoder(x, g, no_skip, b, ""))) CHECK(v == 0.0);
  }
}
