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

#include "mmgcn/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"

namespace mmgcn {

LabelSequence LabelSequence::one_hot(const std::vector<int>& ids, std::size_t num_classes) {
  std::vector<double> p(ids.size() * num_classes, 0.0);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= num_classes) {
      throw ValueError("label " + std::to_string(ids[t]) + " outside [0, " + std::to_string(num_classes) + ")");
    }
    p[t * num_classes + static_cast<std::size_t>(ids[t])] = 1.0;
  }
  return {Tensor::from_data({ids.size(), num_classes}, std::move(p))};
}

void LabelSequence::validate(double tol) const {
  if (probs.rank() != 2) throw ShapeError("label sequence must be [T, K], got " + shape_to_string(probs.shape()));
  const std::size_t k = classes();
  auto d = probs.data();
  for (std::size_t t = 0; t < frames(); ++t) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (d[t * k + c] < 0.0) throw ValueError("label row " + std::to_string(t) + " has a negative entry");
      s += d[t * k + c];
    }
    if (std::abs(s - 1.0) > tol) throw ValueError("label row " + std::to_string(t) + " sums to " + std::to_string(s));
  }
}

std::vector<int> LabelSequence::argmax() const {
  const std::size_t k = classes();
  auto d = probs.data();
  std::vector<int> out(frames());
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = static_cast<int>(std::max_element(d.begin() + static_cast<std::ptrdiff_t>(t * k),
                                               d.begin() + static_cast<std::ptrdiff_t>((t + 1) * k)) -
                              (d.begin() + static_cast<std::ptrdiff_t>(t * k)));
  }
  return out;
}

void SmoothingConfig::validate() const {
  switch (kind) {
    case SmoothingKind::kOriginal:
      return;
    case SmoothingKind::kLinear:
      if (window == 0 || window % 2 == 0) throw ValueError("linear smoothing window must be odd and positive");
      return;
    case SmoothingKind::kGaussian:
      if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValueError("gaussian smoothing sigma must be > 0");
      if (radius == 0) throw ValueError("gaussian smoothing radius must be positive");
      return;
  }
}

std::vector<double> SmoothingConfig::kernel() const {
  validate();
  switch (kind) {
    case SmoothingKind::kOriginal:
      return {1.0};
    case SmoothingKind::kLinear:
      return std::vector<double>(window, 1.0 / static_cast<double>(window));
    case SmoothingKind::kGaussian: {
      std::vector<double> k(2 * radius + 1);
      for (std::size_t i = 0; i < k.size(); ++i) {
        const double r = static_cast<double>(i) - static_cast<double>(radius);
        k[i] = std::exp(-r * r / (2.0 * sigma * sigma));
      }
      const double s = std::accumulate(k.begin(), k.end(), 0.0);
      for (auto& v : k) v /= s;
      return k;
    }
  }
  return {1.0};
}

void MixConfig::validate() const {
  if (!(beta_alpha > 0.0) || !std::isfinite(beta_alpha)) throw ValueError("mixing beta_alpha must be > 0");
  if (fixed_weight && !(*fixed_weight >= 0.0 && *fixed_weight <= 1.0)) {
    throw ValueError("fixed mixing weight must lie in [0, 1]");
  }
}

LabelSequence smooth_labels(const LabelSequence& labels, const SmoothingConfig& cfg) {
  const auto kernel = cfg.kernel();
  if (cfg.kind == SmoothingKind::kOriginal) return labels;
  const std::size_t frames = labels.frames(), k = labels.classes();
  const long radius = static_cast<long>(kernel.size() / 2);
  auto in = labels.probs.data();
  std::vector<double> out(frames * k, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (long j = -radius; j <= radius; ++j) {
      const long s = std::clamp(static_cast<long>(t) + j, 0L, static_cast<long>(frames) - 1);
      const double w = kernel[static_cast<std::size_t>(j + radius)];
      for (std::size_t c = 0; c < k; ++c) out[t * k + c] += w * in[static_cast<std::size_t>(s) * k + c];
    }
  }
  return {Tensor::from_data({frames, k}, std::move(out))};
}

double sample_mix_weight(std::mt19937_64& rng, const MixConfig& cfg) {
  cfg.validate();
  if (cfg.fixed_weight) return *cfg.fixed_weight;
  std::gamma_distribution<double> gamma(cfg.beta_alpha, 1.0);
  // Beta(a, a) as X / (X + Y) with X, Y ~ Gamma(a); rounding to 0 or 1 is redrawn.
  for (;;) {
    const double x = gamma(rng);
    const double y = gamma(rng);
    const double w = x / (x + y);
    if (w > 0.0 && w < 1.0) return w;
  }
}

namespace {

Tensor blend(const Tensor& a, const Tensor& b, double w) {
  if (a.shape() != b.shape()) {
    throw ShapeError("mix_pair: shape mismatch " + shape_to_string(a.shape()) + " vs " + shape_to_string(b.shape()));
  }
  std::vector<double> out(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w * x[i] + (1.0 - w) * y[i];
  return Tensor::from_data(a.shape(), std::move(out));
}

}  // namespace

MixedPair mix_pair(const Tensor& x1, const LabelSequence& y1, const Tensor& x2, const LabelSequence& y2, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw ValueError("mix weight must lie in [0, 1]");
  return {blend(x1, x2, w), {blend(y1.probs, y2.probs, w)}};
}

std::vector<TrainingSample> apply_smoothlabelmix(const std::vector<TrainingSample>& batch,
                                                 const SmoothingConfig& smoothing, const MixConfig& mixing,
                                                 std::uint64_t seed) {
  smoothing.validate();
  mixing.validate();
  if (batch.empty()) return {};
  const std::size_t frames = batch.front().labels.frames();
  for (const auto& s : batch) {
    if (s.labels.frames() != frames || s.motion.dim(0) != frames) {
      throw ShapeError("apply_smoothlabelmix: all sequences in a batch must have the same length");
    }
  }
  std::vector<TrainingSample> smoothed;
  smoothed.reserve(batch.size());
  for (const auto& s : batch) smoothed.push_back({s.motion, s.visual, smooth_labels(s.labels, smoothing)});
  if (!mixing.enabled) return smoothed;
  if (batch.size() < 2) throw ValueError("apply_smoothlabelmix: mixing needs a batch of at least 2");

  // Uniform derangement by rejection: every sample gets a distinct partner.
  std::mt19937_64 pair_rng(derive_seed(seed, 0));
  std::vector<std::size_t> partner(batch.size());
  for (;;) {
    std::iota(partner.begin(), partner.end(), std::size_t{0});
    std::shuffle(partner.begin(), partner.end(), pair_rng);
    bool fixed_point = false;
    for (std::size_t i = 0; i < partner.size() && !fixed_point; ++i) fixed_point = partner[i] == i;
    if (!fixed_point) break;
  }

  std::vector<TrainingSample> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::mt19937_64 rng(derive_seed(seed, i + 1));
    const double w = sample_mix_weight(rng, mixing);
    const auto& a = smoothed[i];
    const auto& b = smoothed[partner[i]];
    MixedPair m = mix_pair(a.motion, a.labels, b.motion, b.labels, w);
    out.push_back({std::move(m.x), blend(a.visual, b.visual, w), std::move(m.y)});
  }
  return out;
}

}  // namespace mmgcn
