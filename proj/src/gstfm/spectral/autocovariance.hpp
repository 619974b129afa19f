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

#include <vector>

#include <Eigen/Dense>

#include "gstfm/core/lattice_field.hpp"
#include "gstfm/spectral/frequency_grid.hpp"

namespace gstfm {

/// Sample autocovariances Gamma(h) for every lag in a symmetric window.
struct AutocovarianceSet {
  IndexBox window;
  std::vector<Eigen::MatrixXd> matrices;  // indexed by window.flat(h)

  const Eigen::MatrixXd& at(SpatioTemporalLag h) const { return matrices[window.flat(h.h1, h.h2, h.h3)]; }
  int n() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
};

/// Gamma(h) = (1/(S1 S2 T)) sum_s x_s x_{s-h}^T over all s with both points on
/// the lattice. Zero when the overlap is empty. No demeaning check.
Eigen::MatrixXd lag_product(const LatticeField& field, SpatioTemporalLag h);

/// All lags |h_d| <= window_d. Requires a demeaned field and window_d < dim_d.
/// Gamma(-h) is stored as the exact transpose of Gamma(h).
AutocovarianceSet sample_autocovariance(const LatticeField& field, const BandwidthTriple& window, int threads = 1);

} // namespace gstfm
