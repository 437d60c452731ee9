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
#include <optional>
#include <random>
#include <vector>

#include "mmgcn/tensor.hpp"

namespace mmgcn {

/// Per-frame class distribution, [T, K]; rows are on the probability simplex.
struct LabelSequence {
  Tensor probs;

  static LabelSequence one_hot(const std::vector<int>& ids, std::size_t num_classes);
  std::size_t frames() const { return probs.dim(0); }
  std::size_t classes() const { return probs.dim(1); }
  /// Throws unless every row is non-negative and sums to 1 within `tol`.
  void validate(double tol = 1e-9) const;
  std::vector<int> argmax() const;
};

enum class SmoothingKind { kOriginal, kLinear, kGaussian };

struct SmoothingConfig {
  SmoothingKind kind = SmoothingKind::kGaussian;
  std::size_t window = 7;  // linear filter width, odd
  double sigma = 2.0;      // gaussian std in frames
  std::size_t radius = 5;  // gaussian truncation

  void validate() const;
  /// Normalized filter taps (length 2r+1); {1} for kOriginal.
  std::vector<double> kernel() const;
};

struct MixConfig {
  double beta_alpha = 0.2;  // both shape parameters of Beta(a, a)
  bool enabled = true;
  /// Replaces the Beta draw with a constant weight (ablations, tests).
  std::optional<double> fixed_weight;

  void validate() const;
};

/// Per-class temporal filtering with replicate padding at both ends.
LabelSequence smooth_labels(const LabelSequence& labels, const SmoothingConfig& cfg);

/// w ~ Beta(a, a), restricted to the open interval (0, 1).
double sample_mix_weight(std::mt19937_64& rng, const MixConfig& cfg);

struct MixedPair {
  Tensor x;
  LabelSequence y;
};

/// x = w*x1 + (1-w)*x2, y = w*y1 + (1-w)*y2.
MixedPair mix_pair(const Tensor& x1, const LabelSequence& y1, const Tensor& x2, const LabelSequence& y2, double w);

struct TrainingSample {
  Tensor motion;  // model node features [T, V, F]
  Tensor visual;  // [T_v, C_i]
  LabelSequence labels;
};

/// Two-stage augmentation: smooth every label sequence, then (if enabled)
/// mix each sample with a partner drawn as a uniformly random fixed-point-free
/// permutation of the batch, using one weight per sample for motion, visual
/// features and labels alike.
std::vector<TrainingSample> apply_smoothlabelmix(const std::vector<TrainingSample>& batch,
                                                 const SmoothingConfig& smoothing, const MixConfig& mixing,
                                                 std::uint64_t seed);

}  // namespace mmgcn
