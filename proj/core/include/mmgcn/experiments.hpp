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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmgcn/config.hpp"
#include "mmgcn/metrics.hpp"

namespace mmgcn {

struct SweepRow {
  double rate = 0.0;
  EvalReport report;
};

/// Evaluates `model` on copies of `dataset` with node dropout at each rate.
/// Every rate uses the same noise seed, so masks are nested only by chance.
std::vector<SweepRow> robustness_sweep(const Model& model, const Dataset& dataset, const std::vector<double>& rates,
                                       std::uint64_t seed, std::size_t threads = 1);

/// One ablation configuration.
struct AblationCell {
  SmoothingKind smoothing = SmoothingKind::kGaussian;
  bool mixing = true;
  bool refinement = true;
  FusionStrategy fusion = FusionStrategy::kMidLate;

  /// Compact label such as "G+mix+ref/mid_late".
  std::string label() const;
  void apply(RunConfig& cfg) const;
};

struct AblationGrid {
  std::vector<SmoothingKind> smoothing{SmoothingKind::kOriginal, SmoothingKind::kLinear, SmoothingKind::kGaussian};
  std::vector<bool> mixing{true, false};
  std::vector<bool> refinement{true, false};
  std::vector<FusionStrategy> fusion{FusionStrategy::kEarly, FusionStrategy::kMid, FusionStrategy::kLate,
                                     FusionStrategy::kMidLate};
  std::vector<std::uint64_t> seeds{0};
  /// Fraction of sequences held out for evaluation (taken from the end).
  double test_fraction = 0.25;
  /// Node dropout applied to the held-out split only.
  double test_dropout = 0.1;
  /// Overrides the base training epochs when non-zero.
  std::size_t epochs = 0;

  /// Cross product in smoothing-major order.
  std::vector<AblationCell> cells() const;
  void validate() const;
};

AblationGrid ablation_grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AblationGrid& grid);

struct AblationResult {
  AblationCell cell;
  std::uint64_t seed = 0;
  EvalReport report;
};

/// Splits `dataset` into train/test per `grid`, corrupts the test split, then
/// trains and evaluates one model per (cell, seed).
std::vector<AblationResult> run_ablation(const Dataset& dataset, const RunConfig& base, const AblationGrid& grid,
                                         const std::function<void(const AblationResult&)>& on_result = {});

/// Trains with `cell` applied to `base` and evaluates on `test`.
AblationResult run_ablation_cell(const Dataset& train_set, const Dataset& test_set, const RunConfig& base,
                                 const AblationCell& cell, std::uint64_t seed);

}  // namespace mmgcn
