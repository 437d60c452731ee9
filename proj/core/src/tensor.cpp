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

#include "mmgcn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "mmgcn/errors.hpp"

namespace mmgcn {

using detail::Node;

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Tensor handle

Tensor::Tensor() : node_(std::make_shared<Node>()) {
  node_->shape = {};
  node_->data = {0.0};
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  std::vector<double> data(shape_numel(shape), value);
  return from_data(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::from_data(Shape shape, std::vector<double> data, bool requires_grad) {
  if (shape_numel(shape) != data.size()) {
    throw ShapeError("tensor shape " + shape_to_string(shape) + " holds " +
                     std::to_string(shape_numel(shape)) + " values, got " + std::to_string(data.size()));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from_data({}, {value}, requires_grad); }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_to_string(shape()));
  }
  return node_->shape[axis];
}

std::span<double> Tensor::mutable_data() {
  if (node_->backward) throw ValueError("mutable_data() on a non-leaf tensor");
  return node_->data;
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_to_string(shape()));
  return node_->data[0];
}

void Tensor::zero_grad() { node_->grad.clear(); }

Tensor Tensor::detach() const { return from_data(shape(), node_->data, false); }

// ---------------------------------------------------------------------------
// Tape

void backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " + shape_to_string(loss.shape()));
  }
  if (!loss.requires_grad()) throw ValueError("backward() on a loss that tracks no inputs");

  // Iterative post-order DFS gives a topological order (inputs before users).
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (n->backward) n->grad.clear();
  }
  loss.node()->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (!n->backward || n->grad.empty()) continue;
    n->backward(*n);
    n->grad.clear();
    n->grad.shrink_to_fit();
  }
}

namespace {

Tensor make_op(const char* op, Shape shape, std::vector<double> data, const std::vector<Tensor>& inputs,
               std::function<void(Node&)> bw) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->op = op;
  bool track = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (track) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (const auto& t : inputs) node->inputs.push_back(t.node());
    node->backward = std::move(bw);
  }
  return Tensor(std::move(node));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
}

void require_rank(const Tensor& x, std::size_t rank, const char* op) {
  if (x.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_to_string(x.shape()));
  }
}

// Product of the dims in [begin, end).
std::size_t span_numel(const Shape& s, std::size_t begin, std::size_t end) {
  std::size_t n = 1;
  for (std::size_t i = begin; i < end; ++i) n *= s[i];
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Elementwise

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return make_op("add", a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      auto& g = in->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return make_op("sub", a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      Node* in = self.inputs[k].get();
      if (!in->requires_grad) continue;
      const double sign = k == 0 ? 1.0 : -1.0;
      auto& g = in->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign * self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return make_op("mul", a.shape(), std::move(out), {a, b}, [](Node& self) {
    Node* na = self.inputs[0].get();
    Node* nb = self.inputs[1].get();
    if (na->requires_grad) {
      auto& g = na->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * nb->data[i];
    }
    if (nb->requires_grad) {
      auto& g = nb->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * na->data[i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= s;
  return make_op("scale", a.shape(), std::move(out), {a}, [s](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
  });
}

Tensor relu(const Tensor& a) {
  std::vector<double> out(a.numel());
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
  return make_op("relu", a.shape(), std::move(out), {a}, [](Node& self) {
    Node* in = self.inputs[0].get();
    auto& g = in->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (in->data[i] > 0.0) g[i] += self.grad[i];
    }
  });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_rank(bias, 1, "add_bias");
  if (x.rank() == 0 || x.shape().back() != bias.dim(0)) {
    throw ShapeError("add_bias: bias " + shape_to_string(bias.shape()) + " does not match " +
                     shape_to_string(x.shape()));
  }
  const std::size_t c = bias.dim(0);
  std::vector<double> out(x.data().begin(), x.data().end());
  auto b = bias.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i % c];
  return make_op("add_bias", x.shape(), std::move(out), {x, bias}, [c](Node& self) {
    Node* nx = self.inputs[0].get();
    Node* nb = self.inputs[1].get();
    if (nx->requires_grad) {
      auto& g = nx->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (nb->requires_grad) {
      auto& g = nb->grad_buffer();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i % c] += self.grad[i];
    }
  });
}

// ---------------------------------------------------------------------------
// Linear algebra

namespace {

// out[n, o] += sum_i x[n, i] * w[i, o]
void gemm_acc(const double* x, const double* w, double* out, std::size_t rows, std::size_t inner,
              std::size_t cols) {
  for (std::size_t n = 0; n < rows; ++n) {
    double* orow = out + n * cols;
    const double* xrow = x + n * inner;
    for (std::size_t i = 0; i < inner; ++i) {
      const double xv = xrow[i];
      if (xv == 0.0) continue;
      const double* wrow = w + i * cols;
      for (std::size_t o = 0; o < cols; ++o) orow[o] += xv * wrow[o];
    }
  }
}

// Shared backward for [rows, inner] x [inner, cols].
void gemm_backward(Node& self, Node* nx, Node* nw, std::size_t rows, std::size_t inner, std::size_t cols) {
  const double* g = self.grad.data();
  if (nx->requires_grad) {
    auto& gx = nx->grad_buffer();
    for (std::size_t n = 0; n < rows; ++n) {
      const double* grow = g + n * cols;
      for (std::size_t i = 0; i < inner; ++i) {
        const double* wrow = nw->data.data() + i * cols;
        double acc = 0.0;
        for (std::size_t o = 0; o < cols; ++o) acc += grow[o] * wrow[o];
        gx[n * inner + i] += acc;
      }
    }
  }
  if (nw->requires_grad) {
    auto& gw = nw->grad_buffer();
    for (std::size_t n = 0; n < rows; ++n) {
      const double* grow = g + n * cols;
      const double* xrow = nx->data.data() + n * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        const double xv = xrow[i];
        if (xv == 0.0) continue;
        double* gwrow = gw.data() + i * cols;
        for (std::size_t o = 0; o < cols; ++o) gwrow[o] += xv * grow[o];
      }
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: incompatible shapes " + shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  gemm_acc(a.data().data(), b.data().data(), out.data(), m, k, n);
  return make_op("matmul", {m, n}, std::move(out), {a, b},
                 [m, k, n](Node& self) { gemm_backward(self, self.inputs[0].get(), self.inputs[1].get(), m, k, n); });
}

Tensor linear(const Tensor& x, const Tensor& w) {
  if (w.rank() != 2 || x.rank() == 0 || x.shape().back() != w.dim(0)) {
    throw ShapeError("linear: incompatible shapes " + shape_to_string(x.shape()) + " and " +
                     shape_to_string(w.shape()));
  }
  const std::size_t k = w.dim(0), n = w.dim(1), m = x.numel() / k;
  Shape out_shape = x.shape();
  out_shape.back() = n;
  std::vector<double> out(m * n, 0.0);
  gemm_acc(x.data().data(), w.data().data(), out.data(), m, k, n);
  return make_op("linear", std::move(out_shape), std::move(out), {x, w},
                 [m, k, n](Node& self) { gemm_backward(self, self.inputs[0].get(), self.inputs[1].get(), m, k, n); });
}

// ---------------------------------------------------------------------------
// Shape

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("reshape: cannot view " + shape_to_string(x.shape()) + " as " + shape_to_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_op("reshape", std::move(shape), std::move(out), {x}, [](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& ref = parts.front().shape();
  if (axis >= ref.size()) throw ShapeError("concat: axis out of range for " + shape_to_string(ref));
  std::vector<std::size_t> sizes;
  std::size_t total = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == ref.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == axis || s[d] == ref[d];
    if (!ok) throw ShapeError("concat: " + shape_to_string(s) + " incompatible with " + shape_to_string(ref));
    sizes.push_back(s[axis]);
    total += s[axis];
  }
  const std::size_t outer = span_numel(ref, 0, axis);
  const std::size_t inner = span_numel(ref, axis + 1, ref.size());
  Shape out_shape = ref;
  out_shape[axis] = total;
  std::vector<double> out(outer * total * inner);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const std::size_t block = sizes[p] * inner;
    auto src = parts[p].data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(src.begin() + o * block, block, out.begin() + o * total * inner + offset);
    }
    offset += block;
  }
  return make_op("concat", std::move(out_shape), std::move(out), parts, [sizes, outer, inner, total](Node& self) {
    std::size_t offset = 0;
    for (std::size_t p = 0; p < self.inputs.size(); ++p) {
      const std::size_t block = sizes[p] * inner;
      Node* in = self.inputs[p].get();
      if (in->requires_grad) {
        auto& g = in->grad_buffer();
        for (std::size_t o = 0; o < outer; ++o) {
          const double* src = self.grad.data() + o * total * inner + offset;
          double* dst = g.data() + o * block;
          for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
        }
      }
      offset += block;
    }
  });
}

Tensor broadcast_nodes(const Tensor& x, std::size_t nodes) {
  require_rank(x, 2, "broadcast_nodes");
  const std::size_t t = x.dim(0), c = x.dim(1);
  std::vector<double> out(t * nodes * c);
  auto src = x.data();
  for (std::size_t f = 0; f < t; ++f) {
    for (std::size_t v = 0; v < nodes; ++v) std::copy_n(src.begin() + f * c, c, out.begin() + (f * nodes + v) * c);
  }
  return make_op("broadcast_nodes", {t, nodes, c}, std::move(out), {x}, [t, nodes, c](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (std::size_t f = 0; f < t; ++f) {
      for (std::size_t v = 0; v < nodes; ++v) {
        const double* src = self.grad.data() + (f * nodes + v) * c;
        for (std::size_t k = 0; k < c; ++k) g[f * c + k] += src[k];
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions

Tensor sum(const Tensor& x) {
  auto d = x.data();
  double s = 0.0;
  for (double v : d) s += v;
  return make_op("sum", {}, {s}, {x}, [](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (auto& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) throw ShapeError("mean: axis out of range for " + shape_to_string(x.shape()));
  const Shape& s = x.shape();
  const std::size_t outer = span_numel(s, 0, axis), n = s[axis], inner = span_numel(s, axis + 1, s.size());
  if (n == 0) throw ShapeError("mean over an empty axis");
  Shape out_shape = s;
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  std::vector<double> out(outer * inner, 0.0);
  auto d = x.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t a = 0; a < n; ++a) {
      const double* src = d.data() + (o * n + a) * inner;
      double* dst = out.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= inv;
  return make_op("mean", std::move(out_shape), std::move(out), {x}, [outer, n, inner, inv](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (std::size_t o = 0; o < outer; ++o) {
      const double* src = self.grad.data() + o * inner;
      for (std::size_t a = 0; a < n; ++a) {
        double* dst = g.data() + (o * n + a) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i] * inv;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Classification

namespace {

// Row-wise log-softmax over the last axis.
std::vector<double> log_softmax_rows(std::span<const double> x, std::size_t k) {
  std::vector<double> out(x.size());
  for (std::size_t r = 0; r < x.size() / k; ++r) {
    const double* row = x.data() + r * k;
    double mx = *std::max_element(row, row + k);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(row[j] - mx);
    const double lse = mx + std::log(s);
    for (std::size_t j = 0; j < k; ++j) out[r * k + j] = row[j] - lse;
  }
  return out;
}

std::size_t class_axis(const Tensor& x, const char* op) {
  if (x.rank() == 0 || x.shape().back() == 0) throw ShapeError(std::string(op) + ": needs a class axis");
  return x.shape().back();
}

}  // namespace

Tensor softmax(const Tensor& x) {
  const std::size_t k = class_axis(x, "softmax");
  auto out = log_softmax_rows(x.data(), k);
  for (auto& v : out) v = std::exp(v);
  return make_op("softmax", x.shape(), std::move(out), {x}, [k](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    const auto& y = self.data;
    for (std::size_t r = 0; r < y.size() / k; ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < k; ++j) dot += self.grad[r * k + j] * y[r * k + j];
      for (std::size_t j = 0; j < k; ++j) g[r * k + j] += y[r * k + j] * (self.grad[r * k + j] - dot);
    }
  });
}

Tensor log_softmax(const Tensor& x) {
  const std::size_t k = class_axis(x, "log_softmax");
  auto out = log_softmax_rows(x.data(), k);
  return make_op("log_softmax", x.shape(), std::move(out), {x}, [k](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    const auto& y = self.data;
    for (std::size_t r = 0; r < y.size() / k; ++r) {
      double gs = 0.0;
      for (std::size_t j = 0; j < k; ++j) gs += self.grad[r * k + j];
      for (std::size_t j = 0; j < k; ++j) g[r * k + j] += self.grad[r * k + j] - std::exp(y[r * k + j]) * gs;
    }
  });
}

Tensor cross_entropy(const Tensor& logits, const Tensor& target) {
  require_same_shape(logits, target, "cross_entropy");
  const std::size_t k = class_axis(logits, "cross_entropy");
  const std::size_t rows = logits.numel() / k;
  auto lsm = log_softmax_rows(logits.data(), k);
  auto y = target.data();
  double loss = 0.0;
  for (std::size_t i = 0; i < lsm.size(); ++i) loss -= y[i] * lsm[i];
  const double inv = 1.0 / static_cast<double>(rows);
  loss *= inv;
  return make_op("cross_entropy", {}, {loss}, {logits, target}, [lsm = std::move(lsm), k, rows, inv](Node& self) {
    Node* nz = self.inputs[0].get();
    Node* ny = self.inputs[1].get();
    const double g0 = self.grad[0] * inv;
    if (nz->requires_grad) {
      auto& g = nz->grad_buffer();
      for (std::size_t r = 0; r < rows; ++r) {
        double mass = 0.0;
        for (std::size_t j = 0; j < k; ++j) mass += ny->data[r * k + j];
        for (std::size_t j = 0; j < k; ++j) {
          const std::size_t i = r * k + j;
          g[i] += g0 * (mass * std::exp(lsm[i]) - ny->data[i]);
        }
      }
    }
    if (ny->requires_grad) {
      auto& g = ny->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= g0 * lsm[i];
    }
  });
}

// ---------------------------------------------------------------------------
// Temporal

Tensor conv_time(const Tensor& x, const Tensor& kernel, std::size_t stride, Padding padding) {
  if (x.rank() < 2) throw ShapeError("conv_time: input must be [T, ..., C], got " + shape_to_string(x.shape()));
  require_rank(kernel, 3, "conv_time");
  if (stride == 0) throw ValueError("conv_time: stride must be positive");
  const std::size_t t_in = x.dim(0), c_in = x.shape().back(), k = kernel.dim(0);
  if (kernel.dim(1) != c_in) {
    throw ShapeError("conv_time: kernel " + shape_to_string(kernel.shape()) + " does not match input " +
                     shape_to_string(x.shape()));
  }
  const std::size_t c_out = kernel.dim(2);
  const std::size_t pad = padding == Padding::kNone ? 0 : (k - 1) / 2;
  const std::size_t padded = t_in + 2 * pad;
  if (k == 0 || k > padded) {
    throw ShapeError("conv_time: kernel length " + std::to_string(k) + " exceeds padded input length " +
                     std::to_string(padded));
  }
  const std::size_t t_out = (padded - k) / stride + 1;
  const std::size_t batch = x.numel() / (t_in * c_in);

  // Source frame for every padded position; -1 marks a zero pad.
  std::vector<long> src(padded);
  for (std::size_t q = 0; q < padded; ++q) {
    long s = static_cast<long>(q) - static_cast<long>(pad);
    if (s < 0 || s >= static_cast<long>(t_in)) {
      s = padding == Padding::kZero ? -1 : std::clamp(s, 0L, static_cast<long>(t_in) - 1);
    }
    src[q] = s;
  }

  Shape out_shape = x.shape();
  out_shape[0] = t_out;
  out_shape.back() = c_out;
  std::vector<double> out(t_out * batch * c_out, 0.0);
  const double* xd = x.data().data();
  const double* kd = kernel.data().data();
  for (std::size_t t = 0; t < t_out; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      const long s = src[t * stride + j];
      if (s < 0) continue;
      gemm_acc(xd + static_cast<std::size_t>(s) * batch * c_in, kd + j * c_in * c_out, out.data() + t * batch * c_out,
               batch, c_in, c_out);
    }
  }

  return make_op("conv_time", std::move(out_shape), std::move(out), {x, kernel},
                 [src = std::move(src), stride, k, t_out, batch, c_in, c_out](Node& self) {
                   Node* nx = self.inputs[0].get();
                   Node* nk = self.inputs[1].get();
                   for (std::size_t t = 0; t < t_out; ++t) {
                     for (std::size_t j = 0; j < k; ++j) {
                       const long s = src[t * stride + j];
                       if (s < 0) continue;
                       const double* g = self.grad.data() + t * batch * c_out;
                       const double* xs = nx->data.data() + static_cast<std::size_t>(s) * batch * c_in;
                       const double* kj = nk->data.data() + j * c_in * c_out;
                       if (nx->requires_grad) {
                         double* gx = nx->grad_buffer().data() + static_cast<std::size_t>(s) * batch * c_in;
                         for (std::size_t b = 0; b < batch; ++b) {
                           for (std::size_t i = 0; i < c_in; ++i) {
                             double acc = 0.0;
                             for (std::size_t o = 0; o < c_out; ++o) acc += g[b * c_out + o] * kj[i * c_out + o];
                             gx[b * c_in + i] += acc;
                           }
                         }
                       }
                       if (nk->requires_grad) {
                         double* gk = nk->grad_buffer().data() + j * c_in * c_out;
                         for (std::size_t b = 0; b < batch; ++b) {
                           for (std::size_t i = 0; i < c_in; ++i) {
                             const double xv = xs[b * c_in + i];
                             if (xv == 0.0) continue;
                             for (std::size_t o = 0; o < c_out; ++o) gk[i * c_out + o] += xv * g[b * c_out + o];
                           }
                         }
                       }
                     }
                   }
                 });
}

std::vector<std::size_t> pool_span_bounds(std::size_t frames, std::size_t bins) {
  if (bins == 0 || bins > frames) {
    throw ValueError("avg_pool_time: bins must be in [1, " + std::to_string(frames) + "], got " +
                     std::to_string(bins));
  }
  const std::size_t base = frames / bins, extra = frames % bins;
  std::vector<std::size_t> bounds(bins + 1, 0);
  for (std::size_t b = 0; b < bins; ++b) bounds[b + 1] = bounds[b] + base + (b < extra ? 1 : 0);
  return bounds;
}

Tensor avg_pool_time(const Tensor& x, std::size_t bins) {
  if (x.rank() == 0) throw ShapeError("avg_pool_time: input needs a time axis");
  const std::size_t t_in = x.dim(0);
  const auto bounds = pool_span_bounds(t_in, bins);
  const std::size_t inner = x.numel() / t_in;
  Shape out_shape = x.shape();
  out_shape[0] = bins;
  std::vector<double> out(bins * inner, 0.0);
  auto d = x.data();
  for (std::size_t b = 0; b < bins; ++b) {
    double* dst = out.data() + b * inner;
    for (std::size_t t = bounds[b]; t < bounds[b + 1]; ++t) {
      for (std::size_t i = 0; i < inner; ++i) dst[i] += d[t * inner + i];
    }
    const double inv = 1.0 / static_cast<double>(bounds[b + 1] - bounds[b]);
    for (std::size_t i = 0; i < inner; ++i) dst[i] *= inv;
  }
  return make_op("avg_pool_time", std::move(out_shape), std::move(out), {x}, [bounds, inner](Node& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
      const double inv = 1.0 / static_cast<double>(bounds[b + 1] - bounds[b]);
      const double* src = self.grad.data() + b * inner;
      for (std::size_t t = bounds[b]; t < bounds[b + 1]; ++t) {
        for (std::size_t i = 0; i < inner; ++i) g[t * inner + i] += src[i] * inv;
      }
    }
  });
}

Tensor interpolate_time(const Tensor& x, std::size_t t_out) {
  if (x.rank() == 0 || x.dim(0) == 0) throw ShapeError("interpolate_time: input needs a non-empty time axis");
  if (t_out == 0) throw ValueError("interpolate_time: t_out must be positive");
  const std::size_t t_in = x.dim(0), inner = x.numel() / t_in;
  // Per output frame: lower source frame and weight of the upper one.
  std::vector<std::size_t> lo(t_out);
  std::vector<double> frac(t_out);
  for (std::size_t j = 0; j < t_out; ++j) {
    if (t_in == 1 || t_out == 1) {
      lo[j] = 0;
      frac[j] = 0.0;
      continue;
    }
    const double pos = static_cast<double>(j * (t_in - 1)) / static_cast<double>(t_out - 1);
    std::size_t i0 = std::min(static_cast<std::size_t>(pos), t_in - 1);
    if (i0 == t_in - 1) {
      lo[j] = t_in - 2;
      frac[j] = 1.0;
    } else {
      lo[j] = i0;
      frac[j] = pos - static_cast<double>(i0);
    }
  }
  Shape out_shape = x.shape();
  out_shape[0] = t_out;
  std::vector<double> out(t_out * inner);
  auto d = x.data();
  for (std::size_t j = 0; j < t_out; ++j) {
    const double* a = d.data() + lo[j] * inner;
    double* dst = out.data() + j * inner;
    if (frac[j] == 0.0) {
      std::copy_n(a, inner, dst);
    } else if (frac[j] == 1.0) {
      std::copy_n(a + inner, inner, dst);
    } else {
      const double w = frac[j];
      for (std::size_t i = 0; i < inner; ++i) dst[i] = (1.0 - w) * a[i] + w * a[inner + i];
    }
  }
  return make_op("interpolate_time", std::move(out_shape), std::move(out), {x},
                 [lo = std::move(lo), frac = std::move(frac), inner](Node& self) {
                   auto& g = self.inputs[0]->grad_buffer();
                   for (std::size_t j = 0; j < lo.size(); ++j) {
                     const double* src = self.grad.data() + j * inner;
                     const double w = frac[j];
                     double* a = g.data() + lo[j] * inner;
                     if (w != 0.0) {
                       double* b = a + inner;
                       for (std::size_t i = 0; i < inner; ++i) b[i] += w * src[i];
                     }
                     if (w != 1.0) {
                       for (std::size_t i = 0; i < inner; ++i) a[i] += (1.0 - w) * src[i];
                     }
                   }
                 });
}

// ---------------------------------------------------------------------------
// Graph / spatial

Tensor node_mix(const Tensor& adj, const Tensor& x) {
  require_rank(adj, 2, "node_mix");
  require_rank(x, 3, "node_mix");
  const std::size_t t = x.dim(0), v = x.dim(1), c = x.dim(2);
  if (adj.dim(0) != v || adj.dim(1) != v) {
    throw ShapeError("node_mix: adjacency " + shape_to_string(adj.shape()) + " does not match input " +
                     shape_to_string(x.shape()));
  }
  std::vector<double> out(x.numel(), 0.0);
  const double* a = adj.data().data();
  const double* xd = x.data().data();
  for (std::size_t f = 0; f < t; ++f) {
    gemm_acc(a, xd + f * v * c, out.data() + f * v * c, v, v, c);
  }
  return make_op("node_mix", x.shape(), std::move(out), {adj, x}, [t, v, c](Node& self) {
    Node* na = self.inputs[0].get();
    Node* nx = self.inputs[1].get();
    for (std::size_t f = 0; f < t; ++f) {
      const double* g = self.grad.data() + f * v * c;
      const double* xf = nx->data.data() + f * v * c;
      if (nx->requires_grad) {
        double* gx = nx->grad_buffer().data() + f * v * c;
        for (std::size_t row = 0; row < v; ++row) {
          for (std::size_t u = 0; u < v; ++u) {
            const double w = na->data[row * v + u];
            if (w == 0.0) continue;
            for (std::size_t k = 0; k < c; ++k) gx[u * c + k] += w * g[row * c + k];
          }
        }
      }
      if (na->requires_grad) {
        double* ga = na->grad_buffer().data();
        for (std::size_t row = 0; row < v; ++row) {
          for (std::size_t u = 0; u < v; ++u) {
            double acc = 0.0;
            for (std::size_t k = 0; k < c; ++k) acc += g[row * c + k] * xf[u * c + k];
            ga[row * v + u] += acc;
          }
        }
      }
    }
  });
}

Tensor conv_spatial(const Tensor& x, const Tensor& kernel) {
  require_rank(x, 4, "conv_spatial");
  require_rank(kernel, 4, "conv_spatial");
  const std::size_t n = x.dim(0), h = x.dim(1), w = x.dim(2), c_in = x.dim(3);
  const std::size_t kh = kernel.dim(0), kw = kernel.dim(1), c_out = kernel.dim(3);
  if (kernel.dim(2) != c_in || kh % 2 == 0 || kw % 2 == 0) {
    throw ShapeError("conv_spatial: kernel " + shape_to_string(kernel.shape()) + " incompatible with input " +
                     shape_to_string(x.shape()));
  }
  const long ph = static_cast<long>(kh / 2), pw = static_cast<long>(kw / 2);
  std::vector<double> out(n * h * w * c_out, 0.0);
  const double* xd = x.data().data();
  const double* kd = kernel.data().data();

  // Visits every (output pixel, tap) pair whose source pixel is inside the image.
  auto for_each_tap = [=](auto&& body) {
    for (std::size_t b = 0; b < n; ++b) {
      for (long y = 0; y < static_cast<long>(h); ++y) {
        for (long xx = 0; xx < static_cast<long>(w); ++xx) {
          const std::size_t opix = (b * h + static_cast<std::size_t>(y)) * w + static_cast<std::size_t>(xx);
          for (long dy = 0; dy < static_cast<long>(kh); ++dy) {
            const long sy = y + dy - ph;
            if (sy < 0 || sy >= static_cast<long>(h)) continue;
            for (long dx = 0; dx < static_cast<long>(kw); ++dx) {
              const long sx = xx + dx - pw;
              if (sx < 0 || sx >= static_cast<long>(w)) continue;
              const std::size_t ipix = (b * h + static_cast<std::size_t>(sy)) * w + static_cast<std::size_t>(sx);
              const std::size_t tap = static_cast<std::size_t>(dy) * kw + static_cast<std::size_t>(dx);
              body(opix, ipix, tap);
            }
          }
        }
      }
    }
  };

  for_each_tap([&](std::size_t opix, std::size_t ipix, std::size_t tap) {
    gemm_acc(xd + ipix * c_in, kd + tap * c_in * c_out, out.data() + opix * c_out, 1, c_in, c_out);
  });

  return make_op("conv_spatial", {n, h, w, c_out}, std::move(out), {x, kernel},
                 [for_each_tap, c_in, c_out](Node& self) {
                   Node* nx = self.inputs[0].get();
                   Node* nk = self.inputs[1].get();
                   double* gx = nx->requires_grad ? nx->grad_buffer().data() : nullptr;
                   double* gk = nk->requires_grad ? nk->grad_buffer().data() : nullptr;
                   for_each_tap([&](std::size_t opix, std::size_t ipix, std::size_t tap) {
                     const double* g = self.grad.data() + opix * c_out;
                     const double* kt = nk->data.data() + tap * c_in * c_out;
                     const double* xs = nx->data.data() + ipix * c_in;
                     for (std::size_t i = 0; i < c_in; ++i) {
                       double acc = 0.0;
                       for (std::size_t o = 0; o < c_out; ++o) {
                         acc += g[o] * kt[i * c_out + o];
                         if (gk) gk[tap * c_in * c_out + i * c_out + o] += xs[i] * g[o];
                       }
                       if (gx) gx[ipix * c_in + i] += acc;
                     }
                   });
                 });
}

// ---------------------------------------------------------------------------
// Gradient check

double grad_check(const std::function<Tensor()>& fn, const std::vector<Tensor>& inputs, double eps) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw ValueError("grad_check: eps must lie in (0, 1e-3]");
  auto eval = [&]() {
    Tensor out = fn();
    if (out.numel() != 1) throw ShapeError("grad_check: function must return a scalar");
    const double v = out.item();
    if (!std::isfinite(v)) throw NumericError("grad_check: function returned a non-finite value");
    return out;
  };

  std::vector<Tensor> leaves = inputs;
  for (auto& t : leaves) t.zero_grad();
  Tensor out = eval();
  if (out.requires_grad()) backward(out);

  double worst = 0.0;
  for (auto& t : leaves) {
    std::vector<double> analytic(t.numel(), 0.0);
    if (t.has_grad()) std::copy(t.grad().begin(), t.grad().end(), analytic.begin());
    auto values = t.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double orig = values[i];
      values[i] = orig + eps;
      const double up = eval().item();
      values[i] = orig - eps;
      const double down = eval().item();
      values[i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
  }
  for (auto& t : leaves) t.zero_grad();
  return worst;
}

}  // namespace mmgcn
