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
#include <vector>

#include "mmgcn/data.hpp"
#include "mmgcn/tensor.hpp"

namespace mmgcn {

/// Frequency ladder of the sinusoidal joint encoder: coordinate c maps to
/// sin/cos(beta * c / alpha^(k/d)) for k = 0 .. d-1.
struct SinusoidalParams {
  double alpha = 10000.0;
  double beta = 100.0;
  std::size_t dims_per_coord = 8;

  void validate() const;
  double frequency(std::size_t k) const;
  std::size_t embedding_size() const { return 6 * dims_per_coord; }
  bool operator==(const SinusoidalParams&) const = default;
};

struct JointPosition {
  double x = 0.0, y = 0.0, z = 0.0;
};

struct CoordinateEmbedding {
  std::vector<double> sin;
  std::vector<double> cos;
};

CoordinateEmbedding encode_coordinate(double c, const SinusoidalParams& params);

/// [sin(X) | sin(Y) | sin(Z) | cos(X) | cos(Y) | cos(Z)], each block d long.
std::vector<double> encode_joint(const JointPosition& p, const SinusoidalParams& params);

/// [T, V, 6d]. Masked nodes encode as all zeros (both blocks), which no
/// genuine position produces.
Tensor encode_sequence(const MotionSequence& motion, const SinusoidalParams& params);

/// Untransformed [T, V, 3] positions, for runs with the encoder disabled.
Tensor raw_positions(const MotionSequence& motion);

}  // namespace mmgcn
