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

#include "gstfm/spectral/frequency_grid.hpp"

#include <cmath>
#include <numbers>

#include "gstfm/util/error.hpp"

namespace gstfm {

void BandwidthTriple::validate(const LatticeDims& dims) const {
  for (int d = 0; d < 3; ++d) {
    if (b[d] < 0 || b[d] >= dims[d])
      throw ConfigError("bandwidth B" + std::to_string(d + 1) + "=" + std::to_string(b[d]) +
                        " must satisfy 0 <= B < " + std::to_string(dims[d]));
  }
}

BandwidthTriple default_bandwidths(const LatticeDims& dims) {
  BandwidthTriple bw;
  for (int d = 0; d < 3; ++d) {
    const int dim = dims[d];
    if (dim <= 1) {
      bw.b[d] = 0;
      continue;
    }
    const int rate = static_cast<int>(std::lround(std::pow(static_cast<double>(dim), 3.0 / 7.0)));
    bw.b[d] = std::min(dim - 1, std::max(2, rate));
  }
  return bw;
}

IndexBox::IndexBox(std::array<int, 3> radius) : radius_(radius) {
  size_ = 1;
  for (int d = 0; d < 3; ++d) {
    if (radius[d] < 0) throw ConfigError("index box radius must be non-negative");
    size_ *= static_cast<std::size_t>(extent(d));
  }
}

std::array<int, 3> IndexBox::offsets(std::size_t idx) const {
  const int h1 = static_cast<int>(idx % extent(0)) - radius_[0];
  idx /= extent(0);
  const int h2 = static_cast<int>(idx % extent(1)) - radius_[1];
  const int h3 = static_cast<int>(idx / extent(1)) - radius_[2];
  return {h1, h2, h3};
}

GridConvention parse_grid_convention(const std::string& name) {
  if (name == "dft") return GridConvention::dft;
  if (name == "paper" || name == "endpoint") return GridConvention::endpoint;
  throw ConfigError("unknown grid convention '" + name + "' (expected dft or endpoint)");
}

std::string to_string(GridConvention convention) {
  return convention == GridConvention::dft ? "dft" : "endpoint";
}

FrequencyGrid::FrequencyGrid(BandwidthTriple bw, GridConvention convention)
    : bw_(bw), convention_(convention), box_(bw.b) {}

double FrequencyGrid::theta(int axis, int h) const {
  const int B = bw_.b[axis];
  if (B == 0) return 0.0;
  if (convention_ == GridConvention::dft) return 2.0 * std::numbers::pi * h / (2.0 * B + 1.0);
  return std::numbers::pi * h / B;
}

std::array<double, 3> FrequencyGrid::point(std::size_t idx) const {
  const auto h = box_.offsets(idx);
  return {theta(0, h[0]), theta(1, h[1]), theta(2, h[2])};
}

std::vector<std::size_t> FrequencyGrid::half() const {
  std::vector<std::size_t> out;
  for (std::size_t i = center(); i < size(); ++i) out.push_back(i);
  return out;
}

} // namespace gstfm
