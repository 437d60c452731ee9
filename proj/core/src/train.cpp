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

#include "mmgcn/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "mmgcn/errors.hpp"
#include "mmgcn/io.hpp"

namespace mmgcn {

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ValueError("learning rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValueError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ValueError("weight decay must be >= 0");
  if (!(grad_clip >= 0.0)) throw ValueError("gradient clip norm must be >= 0");
  if (!(decay_factor > 0.0)) throw ValueError("decay factor must be > 0");
  for (std::size_t i = 1; i < milestones.size(); ++i) {
    if (milestones[i] <= milestones[i - 1]) throw ValueError("lr milestones must be strictly increasing");
  }
  if (batch_size == 0) throw ValueError("batch size must be positive");
  smoothing.validate();
  mixing.validate();
}

double TrainConfig::learning_rate_at(std::size_t epoch) const {
  double lr = learning_rate;
  for (std::size_t m : milestones) {
    if (m <= epoch) lr *= decay_factor;
  }
  return lr;
}

std::size_t threads_from_env() {
  const char* env = std::getenv("MMGCN_THREADS");
  if (env == nullptr) return 1;
  const long n = std::strtol(env, nullptr, 10);
  return n < 1 ? 1 : static_cast<std::size_t>(n);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::min(threads == 0 ? threads_from_env() : threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

std::vector<std::vector<int>> predict_dataset(const Model& model, const Dataset& dataset, std::size_t threads) {
  std::vector<std::vector<int>> out(dataset.sequences.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const Sequence& s = dataset.sequences[i];
    out[i] = predict_segments(model.logits(s.motion, {dataset.visual_tensor(i), VisualSource::kPrecomputed}));
  });
  return out;
}

namespace {

struct SampleResult {
  Gradients grads;
  double loss = 0.0;
  std::size_t hits = 0;
};

double clean_accuracy(const Model& model, const Dataset& dataset, std::size_t threads) {
  const auto preds = predict_dataset(model, dataset, threads);
  std::size_t hits = 0, frames = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& gt = dataset.sequences[i].labels;
    for (std::size_t t = 0; t < gt.size(); ++t) hits += preds[i][t] == gt[t] ? 1 : 0;
    frames += gt.size();
  }
  return static_cast<double>(hits) / static_cast<double>(frames);
}

// Batches of `size` over a shuffled order; a trailing singleton joins the
// previous batch so that mixing always has a partner.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<std::size_t>& order, std::size_t size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < order.size(); i += size) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + size)));
  }
  if (out.size() > 1 && out.back().size() == 1) {
    out[out.size() - 2].push_back(out.back().front());
    out.pop_back();
  }
  return out;
}

}  // namespace

TrainResult train(const Dataset& dataset, const ModelConfig& model_cfg, const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (dataset.sequences.empty()) throw ValueError("train: empty dataset");
  dataset.meta.validate();
  ModelConfig mcfg = model_cfg;
  mcfg.adopt(dataset.meta);
  TrainResult result{Model(mcfg, derive_seed(cfg.seed, 0x5eed)), {}};
  Model& model = result.model;
  const std::size_t threads = cfg.threads == 0 ? threads_from_env() : cfg.threads;
  const std::size_t k = mcfg.num_classes;

  std::vector<TrainingSample> samples;
  samples.reserve(dataset.sequences.size());
  for (std::size_t i = 0; i < dataset.sequences.size(); ++i) {
    const Sequence& s = dataset.sequences[i];
    samples.push_back({model.node_features(s.motion), dataset.visual_tensor(i), LabelSequence::one_hot(s.labels, k)});
  }

  std::map<std::string, std::vector<double>> velocity;
  for (const auto& [name, p] : model.params().entries()) velocity[name].assign(p.values.size(), 0.0);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate_at(epoch);
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 1000 + epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const auto batches = make_batches(order, cfg.batch_size);

    double loss_sum = 0.0;
    std::size_t hits = 0, frames = 0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      std::vector<TrainingSample> batch;
      for (std::size_t idx : batches[bi]) batch.push_back(samples[idx]);
      const auto augmented = apply_smoothlabelmix(batch, cfg.smoothing, cfg.mixing,
                                                  derive_seed(cfg.seed, (epoch + 1) * 1'000'003ULL + bi));

      std::vector<SampleResult> results(augmented.size());
      parallel_for(augmented.size(), threads, [&](std::size_t i) {
        const TrainingSample& s = augmented[i];
        Bindings b(model.params(), true);
        Tensor logits = model.forward(s.motion, {s.visual, VisualSource::kPrecomputed}, b);
        Tensor loss = cross_entropy(logits, s.labels.probs);
        backward(loss);
        results[i].grads = b.gradients();
        results[i].loss = loss.item();
        const auto pred = predict_segments(logits);
        const auto target = s.labels.argmax();
        for (std::size_t t = 0; t < pred.size(); ++t) results[i].hits += pred[t] == target[t] ? 1 : 0;
      });

      const double inv = 1.0 / static_cast<double>(results.size());
      double batch_loss = 0.0;
      for (const auto& r : results) {
        if (!std::isfinite(r.loss)) {
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(bi));
        }
        batch_loss += r.loss * inv;
        hits += r.hits;
      }
      frames += results.size() * mcfg.motion_frames;
      loss_sum += batch_loss;

      Gradients batch_grad;
      double norm_sq = 0.0;
      for (const auto& [name, p] : model.params().entries()) {
        auto& g = batch_grad[name];
        g.assign(p.values.size(), 0.0);
        for (const auto& r : results) {
          auto it = r.grads.find(name);
          if (it == r.grads.end()) continue;
          for (std::size_t j = 0; j < g.size(); ++j) g[j] += it->second[j] * inv;
        }
        for (double v : g) norm_sq += v * v;
      }
      const double norm = std::sqrt(norm_sq);
      if (!std::isfinite(norm)) {
        throw NumericError("non-finite gradient at epoch " + std::to_string(epoch) + ", batch " + std::to_string(bi));
      }
      const double clip = cfg.grad_clip > 0.0 && norm > cfg.grad_clip ? cfg.grad_clip / norm : 1.0;
      for (auto& [name, p] : model.params().entries()) {
        auto& vel = velocity[name];
        const auto& g = batch_grad[name];
        for (std::size_t j = 0; j < g.size(); ++j) {
          vel[j] = cfg.momentum * vel[j] + clip * g[j] + cfg.weight_decay * p.values[j];
          p.values[j] -= lr * vel[j];
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    stats.loss = loss_sum / static_cast<double>(batches.size());
    stats.batch_accuracy = static_cast<double>(hits) / static_cast<double>(frames);
    const bool last = epoch + 1 == cfg.epochs;
    if (cfg.eval_every > 0 && ((epoch + 1) % cfg.eval_every == 0 || last)) {
      stats.train_accuracy = clean_accuracy(model, dataset, threads);
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (cfg.target_accuracy > 0.0 && stats.train_accuracy >= cfg.target_accuracy) break;
  }
  return result;
}

}  // namespace mmgcn
