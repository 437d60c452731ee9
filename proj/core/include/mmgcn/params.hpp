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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mmgcn/tensor.hpp"

namespace mmgcn {

struct Parameter {
  Shape shape;
  std::vector<double> values;
};

/// Named, owned model weights. Iteration order is the lexicographic order of
/// names, which fixes the on-disk layout and the gradient reduction order.
class ParameterSet {
 public:
  void add(const std::string& name, Shape shape, std::vector<double> values);
  /// Glorot-uniform init with fan_in/fan_out taken from the last two dims.
  void add_glorot(const std::string& name, Shape shape, std::mt19937_64& rng);
  void add_constant(const std::string& name, Shape shape, double value);

  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Parameter& at(const std::string& name) const;
  Parameter& at(const std::string& name);
  const std::map<std::string, Parameter>& entries() const { return params_; }
  std::map<std::string, Parameter>& entries() { return params_; }
  std::size_t total_size() const;

  /// Sets every value of every parameter whose name starts with `prefix`.
  void fill_prefix(const std::string& prefix, double value);

  bool operator==(const ParameterSet& other) const;

 private:
  std::map<std::string, Parameter> params_;
};

using Gradients = std::map<std::string, std::vector<double>>;

/// Per-tape view of a ParameterSet: hands out one leaf Tensor per parameter
/// (created on first use) and collects their gradients after backward().
class Bindings {
 public:
  Bindings(const ParameterSet& params, bool track_gradients);

  Tensor get(const std::string& name);
  /// Leaves created so far, in name order.
  std::vector<Tensor> leaves() const;
  /// Gradient per used parameter; unused parameters are absent.
  Gradients gradients() const;

 private:
  const ParameterSet* params_;
  bool track_;
  std::map<std::string, Tensor> leaves_;
};

}  // namespace mmgcn
