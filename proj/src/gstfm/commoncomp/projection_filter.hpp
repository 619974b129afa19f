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
#include <vector>

#include <Eigen/Dense>

#include "gstfm/core/lattice_field.hpp"
#include "gstfm/dynpca/eigensystem.hpp"
#include "gstfm/spectral/frequency_grid.hpp"

namespace gstfm {

/// Rank-q projectors K(theta) = P(theta)^H P(theta) from the leading q
/// eigenvector rows.
struct ProjectionFilter {
  FrequencyGrid grid;
  int q = 0;
  bool identity = false;  // q = n: K(theta) = I exactly
  std::vector<Eigen::MatrixXcd> Khat;

  int n() const { return Khat.empty() ? 0 : static_cast<int>(Khat.front().rows()); }
};

ProjectionFilter projection_filter(const DynamicEigenSystem& sys, int q);

/// Truncation lags (M_S1, M_S2, M_T), 0 <= M_d <= B_d and M_d < dim_d.
struct TruncationSpec {
  std::array<int, 3> m{0, 0, 0};

  int operator[](int axis) const { return m[axis]; }
  void validate(const BandwidthTriple& bw, const LatticeDims& dims) const;
  bool operator==(const TruncationSpec&) const = default;
};

/// M_d = B_d.
inline TruncationSpec default_truncation(const BandwidthTriple& bw) { return TruncationSpec{bw.b}; }

/// Real lag-domain coefficients (1/G) sum_theta K(theta) exp(i <kappa, theta>)
/// for |kappa_d| <= M_d.
struct FilterCoefficients {
  TruncationSpec trunc;
  IndexBox window;
  std::vector<Eigen::MatrixXd> coeffs;  // indexed by window.flat(kappa)

  const Eigen::MatrixXd& at(int k1, int k2, int k3) const { return coeffs[window.flat(k1, k2, k3)]; }
  int n() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().rows()); }
};

/// Throws NumericError if max |Im| exceeds 1e-9 max |Re|.
FilterCoefficients filter_coefficients(const ProjectionFilter& pf, const TruncationSpec& trunc);

/// Lag range [lo_d, hi_d] available at the zero-based point (s1, s2, t):
/// lo = max(s - (S - 1), -M), hi = min(s, M) on every axis.
std::array<int, 6> truncation_ranges(std::array<int, 3> point, const LatticeDims& dims, const TruncationSpec& trunc);

/// chi_s = sum over the truncation range at s of coeff(kappa) x_{s - kappa}.
/// No renormalisation at the boundary.
std::vector<double> apply_filter(const FilterCoefficients& coeffs, const LatticeField& field, int threads = 1);

} // namespace gstfm
