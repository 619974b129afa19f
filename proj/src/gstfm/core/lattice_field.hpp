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
#include <span>
#include <string>
#include <vector>

namespace gstfm {

/// Lattice extents (S1, S2, T). Spatial index (1,1) is the South-West corner,
/// s1 grows East and s2 grows North.
struct LatticeDims {
  int s1 = 1;
  int s2 = 1;
  int t = 1;

  std::size_t points() const {
    return static_cast<std::size_t>(s1) * static_cast<std::size_t>(s2) * static_cast<std::size_t>(t);
  }
  int operator[](int axis) const { return axis == 0 ? s1 : (axis == 1 ? s2 : t); }
  std::array<int, 3> as_array() const { return {s1, s2, t}; }
  bool operator==(const LatticeDims&) const = default;
};

/// Offset h = (h1, h2, h3) between two lattice points.
struct SpatioTemporalLag {
  int h1 = 0;
  int h2 = 0;
  int h3 = 0;
  int operator[](int axis) const { return axis == 0 ? h1 : (axis == 1 ? h2 : h3); }
  SpatioTemporalLag operator-() const { return {-h1, -h2, -h3}; }
  bool operator==(const SpatioTemporalLag&) const = default;
};

/// Real n x S1 x S2 x T observations. Storage order: t fastest, then s2,
/// then s1, then the series index. All public indices here are zero-based;
/// file formats and messages use one-based coordinates.
class LatticeField {
public:
  LatticeField() = default;

  /// Throws DataError naming the first non-finite value.
  LatticeField(int n, LatticeDims dims, std::vector<double> values);

  static LatticeField zeros(int n, LatticeDims dims);

  /// Field already centred by the caller (e.g. a series subset of a demeaned
  /// field). Throws DataError if some series mean is not ~0.
  static LatticeField from_demeaned(int n, LatticeDims dims, std::vector<double> values,
                                    std::vector<double> series_means);

  int n() const { return n_; }
  const LatticeDims& dims() const { return dims_; }
  std::size_t points() const { return dims_.points(); }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int ell, int s1, int s2, int t) const {
    return ((static_cast<std::size_t>(ell) * dims_.s1 + s1) * dims_.s2 + s2) * dims_.t + t;
  }
  double operator()(int ell, int s1, int s2, int t) const { return values_[index(ell, s1, s2, t)]; }

  std::span<const double> values() const { return values_; }
  std::span<const double> series(int ell) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(ell) * points(), points());
  }

  bool demeaned() const { return demeaned_; }
  /// Grand mean per series removed by demean(); empty before demeaning.
  const std::vector<double>& series_means() const { return series_means_; }

  /// Moves the storage out; used by builders that hand values back to a new field.
  std::vector<double> release() && { return std::move(values_); }

private:
  friend LatticeField demean(const LatticeField& field);

  int n_ = 0;
  LatticeDims dims_{};
  std::vector<double> values_;
  bool demeaned_ = false;
  std::vector<double> series_means_;
};

/// Removes the grand mean of every series over all lattice points.
LatticeField demean(const LatticeField& field);

/// Returns `field` when already demeaned, otherwise demean(field).
LatticeField ensure_demeaned(const LatticeField& field);

/// The first m series on the same lattice.
LatticeField subfield(const LatticeField& field, int m);

/// Series picked and reordered by `order` (zero-based indices).
LatticeField select_series(const LatticeField& field, std::span<const int> order);

enum class StackOrder { ell_major, space_major };

/// N = n*S1*S2 location series over T time points, as used by purely temporal
/// dynamic factor analysis.
struct StackedSeries {
  int N = 0;
  int T = 0;
  std::vector<double> values;              // row-major N x T
  std::vector<std::array<int, 3>> index_map;  // i -> (ell, s1, s2), zero-based
  int n = 0;
  LatticeDims source_dims{};
  StackOrder order = StackOrder::ell_major;

  double operator()(int i, int t) const { return values[static_cast<std::size_t>(i) * T + t]; }

  /// View as an (N, 1, 1, T) lattice field.
  LatticeField as_field() const;
  /// Inverse reshape of a field shaped like as_field() back onto the source lattice.
  LatticeField unstack(const LatticeField& stacked) const;
};

StackedSeries stack_to_time_series(const LatticeField& field, StackOrder order = StackOrder::ell_major);

std::string to_string(const LatticeDims& dims);

} // namespace gstfm
