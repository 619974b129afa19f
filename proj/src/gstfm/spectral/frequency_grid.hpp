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

#include <array>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <vector>

#include "gstfm/core/lattice_field.hpp"

namespace gstfm {

/// Bandwidths (B_S1, B_S2, B_T). B_d = 0 is allowed and collapses axis d to
/// lag 0 / frequency 0 (used for singleton axes).
struct BandwidthTriple {
  std::array<int, 3> b{1, 1, 1};

  int operator[](int axis) const { return b[axis]; }
  /// Throws ConfigError unless 0 <= B_d < dim_d on every axis.
  void validate(const LatticeDims& dims) const;
  bool operator==(const BandwidthTriple&) const = default;
};

/// B_d = max(2, round(dim_d^{3/7})) capped at dim_d - 1; 0 on singleton axes.
BandwidthTriple default_bandwidths(const LatticeDims& dims);

/// Symmetric box of integer offsets {-r_d..r_d}^3, flattened with the first
/// axis fastest. The negated offset of flat index i is size()-1-i, so the
/// upper half (i >= center()) is {h3 > 0} plus its tie-broken h3 = 0 part.
class IndexBox {
public:
  IndexBox() = default;
  explicit IndexBox(std::array<int, 3> radius);

  std::size_t size() const { return size_; }
  int radius(int axis) const { return radius_[axis]; }
  int extent(int axis) const { return 2 * radius_[axis] + 1; }
  std::size_t flat(int h1, int h2, int h3) const {
    return (static_cast<std::size_t>(h3 + radius_[2]) * extent(1) + (h2 + radius_[1])) * extent(0) +
           (h1 + radius_[0]);
  }
  std::array<int, 3> offsets(std::size_t idx) const;
  std::size_t mirror(std::size_t idx) const { return size_ - 1 - idx; }
  std::size_t center() const { return (size_ - 1) / 2; }
  bool contains(int h1, int h2, int h3) const {
    return std::abs(h1) <= radius_[0] && std::abs(h2) <= radius_[1] && std::abs(h3) <= radius_[2];
  }

private:
  std::array<int, 3> radius_{0, 0, 0};
  std::size_t size_ = 1;
};

/// dft: theta = 2*pi*h/(2B+1), the exact DFT grid of the lag window, on which
/// the grid average inverts the lag-window transform exactly.
/// endpoint: theta = pi*h/B including both +-pi.
enum class GridConvention { dft, endpoint };

GridConvention parse_grid_convention(const std::string& name);
std::string to_string(GridConvention convention);

/// Discrete frequencies theta_h, |h_d| <= B_d, G = prod(2B_d + 1) points.
class FrequencyGrid {
public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(BandwidthTriple bw, GridConvention convention = GridConvention::dft);

  const BandwidthTriple& bandwidths() const { return bw_; }
  GridConvention convention() const { return convention_; }
  const IndexBox& box() const { return box_; }
  std::size_t size() const { return box_.size(); }
  std::size_t mirror(std::size_t idx) const { return box_.mirror(idx); }
  std::size_t center() const { return box_.center(); }

  /// Frequency of integer h on one axis.
  double theta(int axis, int h) const;
  std::array<double, 3> point(std::size_t idx) const;

  /// Indices of the upper half-grid (including the zero frequency); the rest
  /// are the negations of these.
  std::vector<std::size_t> half() const;

private:
  BandwidthTriple bw_{};
  GridConvention convention_ = GridConvention::dft;
  IndexBox box_{};
};

} // namespace gstfm
