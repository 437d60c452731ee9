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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mmgcn/augment.hpp"
#include "mmgcn/config.hpp"
#include "mmgcn/data.hpp"
#include "mmgcn/encoding.hpp"
#include "mmgcn/graph.hpp"
#include "mmgcn/metrics.hpp"
#include "mmgcn/model.hpp"
#include "mmgcn/train.hpp"

namespace {

using namespace mmgcn;

const Dataset& toy() {
  static const Dataset ds = [] {
    SyntheticConfig cfg;
    cfg.sequence_count = 8;
    return generate_synthetic(cfg);
  }();
  return ds;
}

ModelConfig toy_model() {
  ModelConfig cfg = RunConfig::desk_default().model;
  cfg.adopt(toy().meta);
  return cfg;
}

void BM_EncodeSequence(benchmark::State& state) {
  const auto& motion = toy().sequences[0].motion;
  const SinusoidalParams p;
  for (auto _ : state) benchmark::DoNotOptimize(encode_sequence(motion, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(motion.frames * motion.nodes));
}
BENCHMARK(BM_EncodeSequence);

void BM_SpatialGraphConv(benchmark::State& state) {
  const auto channels = static_cast<std::size_t>(state.range(0));
  const Graph g = build_graph(SkeletonDef::upper_body(), 2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  auto random = [&](Shape s) {
    std::vector<double> v(shape_numel(s));
    for (auto& x : v) x = u(rng);
    return Tensor::from_data(s, std::move(v));
  };
  const Tensor x = random({120, g.node_count, channels}), w = random({channels, channels});
  const Tensor mask = Tensor::full({g.node_count, g.node_count}, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spatial_graph_conv(x, g.normalized, w, mask));
}
BENCHMARK(BM_SpatialGraphConv)->Arg(16)->Arg(48);

void BM_ModelForward(benchmark::State& state) {
  const Model model(toy_model(), 3);
  const auto& s = toy().sequences[0];
  const VisualFeatures vis{toy().visual_tensor(0), VisualSource::kPrecomputed};
  for (auto _ : state) benchmark::DoNotOptimize(model.logits(s.motion, vis));
}
BENCHMARK(BM_ModelForward);

void BM_TrainEpoch(benchmark::State& state) {
  TrainConfig t = RunConfig::desk_default().train;
  t.epochs = 1;
  t.milestones = {};
  t.eval_every = 0;
  const ModelConfig cfg = toy_model();
  for (auto _ : state) benchmark::DoNotOptimize(train(toy(), cfg, t));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(toy().sequences.size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_F1AtK(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::vector<int> gt(frames), pred(frames);
  int g = 0, p = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    if (rng() % 20 == 0) g = static_cast<int>(rng() % 5);
    if (rng() % 15 == 0) p = static_cast<int>(rng() % 5);
    gt[t] = g;
    pred[t] = p;
  }
  for (auto _ : state) benchmark::DoNotOptimize(f1_at_k(gt, pred, 50));
}
BENCHMARK(BM_F1AtK)->Arg(120)->Arg(12000);

}  // namespace
BENCHMARK_MAIN();
