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

#include "mmgcn/metrics.hpp"

#include <algorithm>

#include "mmgcn/errors.hpp"

namespace mmgcn {

namespace {

void require_same_length(const std::vector<int>& gt, const std::vector<int>& pred) {
  if (gt.size() != pred.size()) {
    throw ShapeError("metric inputs differ in length: gt " + std::to_string(gt.size()) + ", pred " +
                     std::to_string(pred.size()));
  }
}

void require_ids(const std::vector<int>& ids, std::size_t num_classes) {
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= num_classes) {
      throw ValueError("class id " + std::to_string(id) + " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

struct ClassCounts {
  std::vector<std::size_t> tp, fp, fn;
};

ClassCounts frame_counts(const std::vector<int>& gt, const std::vector<int>& pred, std::size_t k) {
  ClassCounts c{std::vector<std::size_t>(k), std::vector<std::size_t>(k), std::vector<std::size_t>(k)};
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const auto g = static_cast<std::size_t>(gt[t]), p = static_cast<std::size_t>(pred[t]);
    if (g == p) {
      ++c.tp[g];
    } else {
      ++c.fp[p];
      ++c.fn[g];
    }
  }
  return c;
}

double f1_of(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double f1_from_class_counts(const ClassCounts& c, F1Averaging averaging) {
  const std::size_t k = c.tp.size();
  if (averaging == F1Averaging::kMicro) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < k; ++i) {
      tp += c.tp[i];
      fp += c.fp[i];
      fn += c.fn[i];
    }
    return tp + fp + fn == 0 ? 1.0 : f1_of(tp, fp, fn);
  }
  double total = 0.0;
  std::size_t present = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (c.tp[i] + c.fp[i] + c.fn[i] == 0) continue;
    total += f1_of(c.tp[i], c.fp[i], c.fn[i]);
    ++present;
  }
  return present == 0 ? 1.0 : total / static_cast<double>(present);
}

double iou(const Segment& a, const Segment& b) {
  const std::size_t lo = std::max(a.start, b.start), hi = std::min(a.end, b.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = std::max(a.end, b.end) - std::min(a.start, b.start);
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Segment> segments_without(const std::vector<int>& ids, std::optional<int> ignore_class) {
  auto segs = ids.empty() ? std::vector<Segment>{} : extract_segments(ids);
  if (ignore_class) {
    std::erase_if(segs, [&](const Segment& s) { return s.label == *ignore_class; });
  }
  return segs;
}

}  // namespace

double framewise_accuracy(const std::vector<int>& gt, const std::vector<int>& pred) {
  require_same_length(gt, pred);
  if (gt.empty()) throw ValueError("framewise_accuracy: empty sequences");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) hits += gt[t] == pred[t] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

double f1_frame(const std::vector<int>& gt, const std::vector<int>& pred, F1Averaging averaging,
                std::size_t num_classes) {
  require_same_length(gt, pred);
  require_ids(gt, num_classes);
  require_ids(pred, num_classes);
  return f1_from_class_counts(frame_counts(gt, pred, num_classes), averaging);
}

std::vector<Segment> extract_segments(const std::vector<int>& ids) {
  if (ids.empty()) throw ValueError("extract_segments: empty sequence");
  std::vector<Segment> out;
  std::size_t start = 0;
  for (std::size_t t = 1; t <= ids.size(); ++t) {
    if (t == ids.size() || ids[t] != ids[start]) {
      out.push_back({ids[start], start, t});
      start = t;
    }
  }
  return out;
}

SegmentCounts segment_matches(const std::vector<int>& gt, const std::vector<int>& pred, int k_percent,
                              std::optional<int> ignore_class) {
  require_same_length(gt, pred);
  const double threshold = static_cast<double>(k_percent) / 100.0;
  const auto gt_segs = segments_without(gt, ignore_class);
  const auto pred_segs = segments_without(pred, ignore_class);
  std::vector<bool> matched(gt_segs.size(), false);
  SegmentCounts c;
  for (const Segment& p : pred_segs) {
    std::size_t best = gt_segs.size();
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gt_segs.size(); ++g) {
      if (matched[g] || gt_segs[g].label != p.label) continue;
      const double v = iou(p, gt_segs[g]);
      if (v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (best < gt_segs.size() && best_iou >= threshold) {
      matched[best] = true;
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<std::size_t>(std::count(matched.begin(), matched.end(), false));
  return c;
}

double f1_from_counts(const SegmentCounts& c) {
  if (c.tp + c.fp + c.fn == 0) return 1.0;
  const double precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

double f1_at_k(const std::vector<int>& gt, const std::vector<int>& pred, int k_percent, std::optional<int> ignore_class) {
  return f1_from_counts(segment_matches(gt, pred, k_percent, ignore_class));
}

EvalReport evaluate(const std::vector<int>& gt, const std::vector<int>& pred, std::size_t num_classes,
                    std::optional<int> ignore_class) {
  return evaluate_many({gt}, {pred}, num_classes, ignore_class);
}

EvalReport evaluate_many(const std::vector<std::vector<int>>& gt, const std::vector<std::vector<int>>& pred,
                         std::size_t num_classes, std::optional<int> ignore_class) {
  if (gt.size() != pred.size()) throw ShapeError("evaluate: sequence counts differ");
  if (gt.empty()) throw ValueError("evaluate: no sequences");
  ClassCounts pooled{std::vector<std::size_t>(num_classes), std::vector<std::size_t>(num_classes),
                     std::vector<std::size_t>(num_classes)};
  EvalReport r;
  std::size_t hits = 0, frames = 0;
  for (std::size_t s = 0; s < gt.size(); ++s) {
    require_same_length(gt[s], pred[s]);
    require_ids(gt[s], num_classes);
    require_ids(pred[s], num_classes);
    const ClassCounts c = frame_counts(gt[s], pred[s], num_classes);
    for (std::size_t i = 0; i < num_classes; ++i) {
      pooled.tp[i] += c.tp[i];
      pooled.fp[i] += c.fp[i];
      pooled.fn[i] += c.fn[i];
      hits += c.tp[i];
    }
    frames += gt[s].size();
    for (std::size_t k = 0; k < kOverlapThresholds.size(); ++k) {
      const SegmentCounts sc = segment_matches(gt[s], pred[s], kOverlapThresholds[k], ignore_class);
      r.segment_counts[k].tp += sc.tp;
      r.segment_counts[k].fp += sc.fp;
      r.segment_counts[k].fn += sc.fn;
    }
  }
  if (frames == 0) throw ValueError("evaluate: empty sequences");
  r.accuracy = static_cast<double>(hits) / static_cast<double>(frames);
  r.f1_macro = f1_from_class_counts(pooled, F1Averaging::kMacro);
  r.f1_micro = f1_from_class_counts(pooled, F1Averaging::kMicro);
  for (std::size_t k = 0; k < kOverlapThresholds.size(); ++k) r.f1_at[k] = f1_from_counts(r.segment_counts[k]);
  return r;
}

}  // namespace mmgcn
