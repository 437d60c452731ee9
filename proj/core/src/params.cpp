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

#include "mmgcn/params.hpp"

#include <cmath>

#include "mmgcn/errors.hpp"

namespace mmgcn {

void ParameterSet::add(const std::string& name, Shape shape, std::vector<double> values) {
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("parameter '" + name + "': shape " + shape_to_string(shape) + " does not hold " +
                     std::to_string(values.size()) + " values");
  }
  if (!params_.emplace(name, Parameter{std::move(shape), std::move(values)}).second) {
    throw ValueError("duplicate parameter '" + name + "'");
  }
}

void ParameterSet::add_glorot(const std::string& name, Shape shape, std::mt19937_64& rng) {
  if (shape.size() < 2) throw ShapeError("glorot init needs at least two dims for '" + name + "'");
  std::size_t receptive = 1;
  for (std::size_t i = 0; i + 2 < shape.size(); ++i) receptive *= shape[i];
  const double fan_in = static_cast<double>(shape[shape.size() - 2] * receptive);
  const double fan_out = static_cast<double>(shape.back() * receptive);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<double> values(shape_numel(shape));
  for (auto& v : values) v = dist(rng);
  add(name, std::move(shape), std::move(values));
}

void ParameterSet::add_constant(const std::string& name, Shape shape, double value) {
  std::vector<double> values(shape_numel(shape), value);
  add(name, std::move(shape), std::move(values));
}

const Parameter& ParameterSet::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ValueError("unknown parameter '" + name + "'");
  return it->second;
}

Parameter& ParameterSet::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ValueError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterSet::total_size() const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_) n += p.values.size();
  return n;
}

void ParameterSet::fill_prefix(const std::string& prefix, double value) {
  for (auto& [name, p] : params_) {
    if (name.rfind(prefix, 0) == 0) std::fill(p.values.begin(), p.values.end(), value);
  }
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (auto a = params_.begin(), b = other.params_.begin(); a != params_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.shape != b->second.shape || a->second.values != b->second.values) {
      return false;
    }
  }
  return true;
}

Bindings::Bindings(const ParameterSet& params, bool track_gradients) : params_(&params), track_(track_gradients) {}

Tensor Bindings::get(const std::string& name) {
  auto it = leaves_.find(name);
  if (it != leaves_.end()) return it->second;
  const Parameter& p = params_->at(name);
  Tensor leaf = Tensor::from_data(p.shape, p.values, track_);
  leaves_.emplace(name, leaf);
  return leaf;
}

std::vector<Tensor> Bindings::leaves() const {
  std::vector<Tensor> out;
  out.reserve(leaves_.size());
  for (const auto& [_, t] : leaves_) out.push_back(t);
  return out;
}

Gradients Bindings::gradients() const {
  Gradients out;
  for (const auto& [name, t] : leaves_) {
    std::vector<double> g(t.numel(), 0.0);
    if (t.has_grad()) std::copy(t.grad().begin(), t.grad().end(), g.begin());
    out.emplace(name, std::move(g));
  }
  return out;
}

}  // namespace mmgcn
