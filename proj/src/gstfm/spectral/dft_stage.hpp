/*
 * Copyright 2026 The gstfm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <complex>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "gstfm/spectral/frequency_grid.hpp"

namespace gstfm::detail {

// One separable DFT stage along `axis`:
//   out[.., k, ..] = sum_h sign_phase(h, k) * in[.., h, ..]
// Only output indices accepted by `wanted` are formed.
template <class In, class Wanted>
std::vector<Eigen::MatrixXcd> dft_stage(const std::vector<In>& in, const FrequencyGrid& grid, int axis, double sign,
                                        Wanted&& wanted) {
  const IndexBox& box = grid.box();
  const int B = box.radius(axis);
  const Eigen::Index n = in.front().rows();
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(box.extent(axis)) * box.extent(axis));
  for (int k = -B; k <= B; ++k)
    for (int h = -B; h <= B; ++h)
      phase[(k + B) * box.extent(axis) + (h + B)] = std::polar(1.0, sign * h * grid.theta(axis, k));

  std::vector<Eigen::MatrixXcd> out(box.size());
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    if (!wanted(idx)) continue;
    auto off = box.offsets(idx);
    const int k = off[axis];
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (int h = -B; h <= B; ++h) {
      off[axis] = h;
      const auto& src = in[box.flat(off[0], off[1], off[2])];
      const std::complex<double> p = phase[(k + B) * box.extent(axis) + (h + B)];
      if constexpr (std::is_same_v<In, Eigen::MatrixXd>)
        acc += p * src.template cast<std::complex<double>>();
      else
        acc += p * src;
    }
    out[idx] = std::move(acc);
  }
  return out;
}


} // namespace gstfm::detail
