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
#include <vector>

#include "mmgcn/augment.hpp"
#include "mmgcn/data.hpp"
#include "mmgcn/model.hpp"

namespace mmgcn {

struct TrainConfig {
  double learning_rate = 1e-4;
  double momentum = 0.9;
  double weight_decay = 0.0;
  /// Rescales the batch gradient to this global L2 norm when exceeded; 0 disables.
  double grad_clip = 0.0;
  std::vector<std::size_t> milestones{30, 45};
  double decay_factor = 0.1;
  std::size_t batch_size = 32;
  std::size_t epochs = 60;
  SmoothingConfig smoothing;
  MixConfig mixing;
  std::uint64_t seed = 0;
  /// Stop once clean training accuracy reaches this value (0 disables).
  double target_accuracy = 0.0;
  /// Clean (unaugmented) training accuracy every N epochs; 0 skips it.
  std::size_t eval_every = 1;
  /// Worker threads for per-sequence forward/backward; 0 reads MMGCN_THREADS.
  std::size_t threads = 1;

  void validate() const;
  /// lr_0 * decay_factor^(number of milestones <= epoch), epochs counted from 0.
  double learning_rate_at(std::size_t epoch) const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  double loss = 0.0;            // mean over batches
  double batch_accuracy = 0.0;  // argmax(pred) vs argmax(augmented target)
  double train_accuracy = -1.0; // clean framewise accuracy, -1 when not measured
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> history;
};

/// Minibatch SGD with momentum on mean per-frame cross-entropy against
/// SmoothLabelMix targets. Deterministic for a fixed (data, configs, seed),
/// independent of the thread count.
TrainResult train(const Dataset& dataset, const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

/// Framewise predictions of `model` for every sequence of `dataset`.
std::vector<std::vector<int>> predict_dataset(const Model& model, const Dataset& dataset, std::size_t threads = 1);

/// Worker count from MMGCN_THREADS (defaults to 1, clamped to >= 1).
std::size_t threads_from_env();

/// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace mmgcn
