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

#include "mmgcn/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"

namespace mmgcn {

namespace {

const char* smoothing_code(SmoothingKind k) {
  switch (k) {
    case SmoothingKind::kOriginal:
      return "O";
    case SmoothingKind::kLinear:
      return "L";
    case SmoothingKind::kGaussian:
      return "G";
  }
  return "?";
}

SmoothingKind smoothing_from_code(const std::string& s) {
  if (s == "O" || s == "original") return SmoothingKind::kOriginal;
  if (s == "L" || s == "linear") return SmoothingKind::kLinear;
  if (s == "G" || s == "gaussian") return SmoothingKind::kGaussian;
  throw ConfigError("grid.smoothing: unknown kind '" + s + "'");
}

std::vector<std::vector<int>> labels_of(const Dataset& d) {
  std::vector<std::vector<int>> out;
  out.reserve(d.sequences.size());
  for (const auto& s : d.sequences) out.push_back(s.labels);
  return out;
}

}  // namespace

std::vector<SweepRow> robustness_sweep(const Model& model, const Dataset& dataset, const std::vector<double>& rates,
                                       std::uint64_t seed, std::size_t threads) {
  const auto gt = labels_of(dataset);
  std::vector<SweepRow> rows;
  for (double rate : rates) {
    const Dataset noisy = inject_node_dropout(dataset, {rate, seed});
    rows.push_back({rate, evaluate_many(gt, predict_dataset(model, noisy, threads), model.config().num_classes)});
  }
  return rows;
}

std::string AblationCell::label() const {
  std::string s = smoothing_code(smoothing);
  s += mixing ? "+mix" : "-mix";
  s += refinement ? "+ref/" : "-ref/";
  return s + to_string(fusion);
}

void AblationCell::apply(RunConfig& cfg) const {
  cfg.train.smoothing.kind = smoothing;
  cfg.train.mixing.enabled = mixing;
  cfg.model.refinement.enabled = refinement;
  cfg.model.fusion = fusion;
}

std::vector<AblationCell> AblationGrid::cells() const {
  std::vector<AblationCell> out;
  for (auto s : smoothing)
    for (bool m : mixing)
      for (bool r : refinement)
        for (auto f : fusion) out.push_back({s, m, r, f});
  return out;
}

void AblationGrid::validate() const {
  if (smoothing.empty() || mixing.empty() || refinement.empty() || fusion.empty() || seeds.empty()) {
    throw ConfigError("grid: every axis needs at least one value");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("grid.test_fraction must lie in (0, 1)");
  if (!(test_dropout >= 0.0 && test_dropout <= 1.0)) throw ConfigError("grid.test_dropout must lie in [0, 1]");
}

AblationGrid ablation_grid_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("grid: expected a JSON object");
  AblationGrid g;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "smoothing") {
        g.smoothing.clear();
        for (const auto& s : v) g.smoothing.push_back(smoothing_from_code(s.get<std::string>()));
      } else if (key == "mixing") {
        g.mixing = v.get<std::vector<bool>>();
      } else if (key == "refinement") {
        g.refinement = v.get<std::vector<bool>>();
      } else if (key == "fusion") {
        g.fusion.clear();
        for (const auto& s : v) g.fusion.push_back(fusion_from_string(s.get<std::string>()));
      } else if (key == "seeds") {
        g.seeds = v.get<std::vector<std::uint64_t>>();
      } else if (key == "test_fraction") {
        g.test_fraction = v.get<double>();
      } else if (key == "test_dropout") {
        g.test_dropout = v.get<double>();
      } else if (key == "epochs") {
        g.epochs = v.get<std::size_t>();
      } else {
        throw ConfigError("grid: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const ValueError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  g.validate();
  return g;
}

nlohmann::json to_json(const AblationGrid& g) {
  nlohmann::json j;
  j["smoothing"] = nlohmann::json::array();
  for (auto s : g.smoothing) j["smoothing"].push_back(smoothing_code(s));
  j["mixing"] = g.mixing;
  j["refinement"] = g.refinement;
  j["fusion"] = nlohmann::json::array();
  for (auto f : g.fusion) j["fusion"].push_back(to_string(f));
  j["seeds"] = g.seeds;
  j["test_fraction"] = g.test_fraction;
  j["test_dropout"] = g.test_dropout;
  j["epochs"] = g.epochs;
  return j;
}

AblationResult run_ablation_cell(const Dataset& train_set, const Dataset& test_set, const RunConfig& base,
                                 const AblationCell& cell, std::uint64_t seed) {
  RunConfig cfg = base;
  cell.apply(cfg);
  cfg.train.seed = seed;
  cfg.train.target_accuracy = 0.0;
  cfg.train.eval_every = 0;
  const TrainResult trained = train(train_set, cfg.model, cfg.train);
  const auto pred = predict_dataset(trained.model, test_set, cfg.train.threads);
  return {cell, seed, evaluate_many(labels_of(test_set), pred, trained.model.config().num_classes)};
}

std::vector<AblationResult> run_ablation(const Dataset& dataset, const RunConfig& base, const AblationGrid& grid,
                                         const std::function<void(const AblationResult&)>& on_result) {
  grid.validate();
  const auto n = dataset.sequences.size();
  const auto test_count = static_cast<std::size_t>(std::lround(grid.test_fraction * static_cast<double>(n)));
  if (test_count == 0 || test_count >= n) throw ValueError("ablation: dataset too small for the requested split");
  auto [train_set, test_clean] = dataset.split(n - test_count);
  RunConfig cfg = base;
  if (grid.epochs > 0) {
    // Scale the milestones with the shortened schedule.
    for (auto& m : cfg.train.milestones) m = m * grid.epochs / std::max<std::size_t>(cfg.train.epochs, 1);
    auto& ms = cfg.train.milestones;
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    cfg.train.epochs = grid.epochs;
  }
  std::vector<AblationResult> out;
  for (const auto& cell : grid.cells()) {
    for (std::uint64_t seed : grid.seeds) {
      const Dataset test_set = inject_node_dropout(test_clean, {grid.test_dropout, derive_seed(seed, 0xd20b)});
      out.push_back(run_ablation_cell(train_set, test_set, cfg, cell, seed));
      if (on_result) on_result(out.back());
    }
  }
  return out;
}

}  // namespace mmgcn
