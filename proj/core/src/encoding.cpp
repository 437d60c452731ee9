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

#include "mmgcn/encoding.hpp"

#include <cmath>

#include "mmgcn/errors.hpp"

namespace mmgcn {

void SinusoidalParams::validate() const {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw ValueError("sinusoidal alpha must be > 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValueError("sinusoidal beta must be > 0");
  if (dims_per_coord == 0) throw ValueError("sinusoidal dims_per_coord must be >= 1");
}

double SinusoidalParams::frequency(std::size_t k) const {
  return beta / std::pow(alpha, static_cast<double>(k) / static_cast<double>(dims_per_coord));
}

CoordinateEmbedding encode_coordinate(double c, const SinusoidalParams& params) {
  params.validate();
  if (!std::isfinite(c)) throw ValueError("encode_coordinate: non-finite coordinate");
  const std::size_t d = params.dims_per_coord;
  CoordinateEmbedding e{std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t k = 0; k < d; ++k) {
    const double phase = c * params.frequency(k);
    e.sin[k] = std::sin(phase);
    e.cos[k] = std::cos(phase);
  }
  return e;
}

std::vector<double> encode_joint(const JointPosition& p, const SinusoidalParams& params) {
  const std::size_t d = params.dims_per_coord;
  std::vector<double> out(6 * d);
  const double coords[3] = {p.x, p.y, p.z};
  for (std::size_t a = 0; a < 3; ++a) {
    const CoordinateEmbedding e = encode_coordinate(coords[a], params);
    std::copy(e.sin.begin(), e.sin.end(), out.begin() + static_cast<std::ptrdiff_t>(a * d));
    std::copy(e.cos.begin(), e.cos.end(), out.begin() + static_cast<std::ptrdiff_t>((3 + a) * d));
  }
  return out;
}

Tensor encode_sequence(const MotionSequence& motion, const SinusoidalParams& params) {
  params.validate();
  if (motion.frames == 0 || motion.nodes == 0) throw ValueError("encode_sequence: empty motion sequence");
  motion.validate();
  const std::size_t width = params.embedding_size();
  std::vector<double> out(motion.frames * motion.nodes * width, 0.0);
  for (std::size_t t = 0; t < motion.frames; ++t) {
    for (std::size_t v = 0; v < motion.nodes; ++v) {
      if (!motion.is_valid(t, v)) continue;
      const auto e = encode_joint({motion.position(t, v, 0), motion.position(t, v, 1), motion.position(t, v, 2)}, params);
      std::copy(e.begin(), e.end(), out.begin() + static_cast<std::ptrdiff_t>((t * motion.nodes + v) * width));
    }
  }
  return Tensor::from_data({motion.frames, motion.nodes, width}, std::move(out));
}

Tensor raw_positions(const MotionSequence& motion) {
  if (motion.frames == 0 || motion.nodes == 0) throw ValueError("raw_positions: empty motion sequence");
  motion.validate();
  return Tensor::from_data({motion.frames, motion.nodes, 3}, motion.positions);
}

}  // namespace mmgcn
