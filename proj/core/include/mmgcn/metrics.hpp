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

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace mmgcn {

/// Maximal run of one class over frames [start, end).
struct Segment {
  int label = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

enum class F1Averaging { kMacro, kMicro };

struct SegmentCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
  bool operator==(const SegmentCounts&) const = default;
};

inline constexpr std::array<int, 3> kOverlapThresholds{10, 25, 50};

struct EvalReport {
  double accuracy = 0.0;
  double f1_macro = 0.0;
  double f1_micro = 0.0;
  std::array<double, 3> f1_at{};             // for kOverlapThresholds
  std::array<SegmentCounts, 3> segment_counts{};
};

double framewise_accuracy(const std::vector<int>& gt, const std::vector<int>& pred);

/// Framewise F1. Macro averages per-class F1 over the classes present in
/// gt or pred; micro pools the counts of all classes.
double f1_frame(const std::vector<int>& gt, const std::vector<int>& pred, F1Averaging averaging,
                std::size_t num_classes);

std::vector<Segment> extract_segments(const std::vector<int>& ids);

/// Segmental matching at IoU threshold k_percent/100: predicted segments are
/// visited in temporal order and each claims the unmatched same-class
/// ground-truth segment of highest IoU (earliest on ties). Segments of
/// `ignore_class`, when given, are dropped from both sides first.
SegmentCounts segment_matches(const std::vector<int>& gt, const std::vector<int>& pred, int k_percent,
                              std::optional<int> ignore_class = std::nullopt);
double f1_from_counts(const SegmentCounts& c);
double f1_at_k(const std::vector<int>& gt, const std::vector<int>& pred, int k_percent,
               std::optional<int> ignore_class = std::nullopt);

EvalReport evaluate(const std::vector<int>& gt, const std::vector<int>& pred, std::size_t num_classes,
                    std::optional<int> ignore_class = std::nullopt);

/// Pools several sequences: frame metrics over all frames, segment counts
/// summed before computing F1@k.
EvalReport evaluate_many(const std::vector<std::vector<int>>& gt, const std::vector<std::vector<int>>& pred,
                         std::size_t num_classes, std::optional<int> ignore_class = std::nullopt);

}  // namespace mmgcn
