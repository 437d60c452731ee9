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

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mmgcn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {

// One entry of the computation tape. Interior nodes own a backward closure
// that reads `grad` and accumulates into the grads of `inputs`.
struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  std::vector<double>& grad_buffer() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

/// Dense row-major tensor of doubles with optional reverse-mode tracking.
///
/// A Tensor is a cheap handle; copies alias the same storage. Values are
/// immutable once an operation has consumed them, except for leaves, whose
/// storage can be edited in place through mutable_data() (used by the
/// optimizer and by finite-difference checks).
class Tensor {
 public:
  Tensor();

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return node_->data.size(); }

  std::span<const double> data() const { return node_->data; }
  std::span<double> mutable_data();
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  bool is_leaf() const { return !node_->backward; }
  bool has_grad() const { return !node_->grad.empty(); }
  /// Accumulated gradient; empty span when nothing has been accumulated yet.
  std::span<const double> grad() const { return node_->grad; }
  void zero_grad();

  /// Untracked copy of the values.
  Tensor detach() const;
  const char* op() const { return node_->op; }

  // Internal: used by the op implementations.
  const std::shared_ptr<detail::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Accumulates d(loss)/d(x) into every tracked leaf reachable from `loss`.
/// Repeated calls without zero_grad() accumulate.
void backward(const Tensor& loss);

enum class Padding { kNone, kReplicate, kZero };

// ---- elementwise -----------------------------------------------------------
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor relu(const Tensor& a);
/// x[..., C] + bias[C]
Tensor add_bias(const Tensor& x, const Tensor& bias);

// ---- linear algebra --------------------------------------------------------
Tensor matmul(const Tensor& a, const Tensor& b);
/// Contracts the last axis of x[..., C_in] with w[C_in, C_out].
Tensor linear(const Tensor& x, const Tensor& w);

// ---- shape -----------------------------------------------------------------
Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
/// [T, C] -> [T, V, C], repeating each frame over V nodes.
Tensor broadcast_nodes(const Tensor& x, std::size_t nodes);

// ---- reductions ------------------------------------------------------------
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x, std::size_t axis);

// ---- classification --------------------------------------------------------
Tensor softmax(const Tensor& x);
Tensor log_softmax(const Tensor& x);
/// Mean over rows of -sum_k target[t,k] * log_softmax(logits)[t,k].
Tensor cross_entropy(const Tensor& logits, const Tensor& target);

// ---- temporal ----------------------------------------------------------------
/// Cross-correlation along axis 0 of x[T, ..., C_in] with kernel[k, C_in, C_out].
/// Axes between the first and the last are independent (e.g. graph nodes).
/// Padding adds (k-1)/2 frames at both ends unless it is kNone.
Tensor conv_time(const Tensor& x, const Tensor& kernel, std::size_t stride, Padding padding);
/// Average over `bins` contiguous spans of axis 0; the T % bins leftover
/// frames go one each to the earliest bins.
Tensor avg_pool_time(const Tensor& x, std::size_t bins);
/// Endpoint-aligned linear resampling of axis 0 to t_out frames.
Tensor interpolate_time(const Tensor& x, std::size_t t_out);

// ---- graph / spatial ---------------------------------------------------------
/// out[t, v, c] = sum_u adj[v, u] * x[t, u, c]
Tensor node_mix(const Tensor& adj, const Tensor& x);
/// Zero-padded "same" 2D cross-correlation of x[N, H, W, C_in] with
/// kernel[kh, kw, C_in, C_out] (kh, kw odd).
Tensor conv_spatial(const Tensor& x, const Tensor& kernel);

// ---- span helpers shared with tests and fusion ----------------------------------
/// Start frame of each pooling span plus a final sentinel equal to `frames`.
std::vector<std::size_t> pool_span_bounds(std::size_t frames, std::size_t bins);

/// Central-difference gradient check. `fn` must rebuild its graph from the
/// (leaf) `inputs` on every call and return a scalar. Returns the largest
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8) over all input
/// coordinates.
double grad_check(const std::function<Tensor()>& fn, const std::vector<Tensor>& inputs,
                  double eps = 1e-5);

}  // namespace mmgcn
