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

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gstfm/core/lattice_field.hpp"
#include "gstfm/spectral/autocovariance.hpp"
#include "gstfm/spectral/frequency_grid.hpp"
#include "gstfm/spectral/kernel.hpp"

namespace gstfm {

/// Kernel-smoothed spectral density matrices on a frequency grid.
struct SpectralDensityEstimate {
  FrequencyGrid grid;
  KernelTriple kernels{};
  std::vector<Eigen::MatrixXcd> matrices;  // one n x n Hermitian matrix per grid index
  AutocovarianceSet source_autocov;

  int n() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
};

/// Product kernel weight K1(h1/B1) K2(h2/B2) K3(h3/B3); an axis with B = 0
/// only admits h = 0 with weight 1.
double lag_window_weight(const KernelTriple& kernels, const BandwidthTriple& bw, int h1, int h2, int h3);

/// Lag-window estimator
///   Sigma(theta) = sum_{|h_d| <= B_d} w(h) Gamma(h) exp(-i <h, theta>)
/// evaluated on the upper half-grid, Hermitian-symmetrized and mirror-filled
/// with Sigma(-theta) = conj(Sigma(theta)). Requires a demeaned field.
SpectralDensityEstimate estimate_spectral_density(const LatticeField& field, const KernelTriple& kernels,
                                                  const BandwidthTriple& bw,
                                                  GridConvention convention = GridConvention::dft, int threads = 1);

/// Same transform applied to an existing autocovariance set.
SpectralDensityEstimate spectral_density_from_autocov(AutocovarianceSet autocov, const KernelTriple& kernels,
                                                      GridConvention convention = GridConvention::dft);

/// Principal submatrix on the leading m series of a permutation `order`.
SpectralDensityEstimate principal_submatrix(const SpectralDensityEstimate& spec, std::span<const int> order);

/// JSON document with grid metadata and row-major re/im arrays per frequency.
std::string spectral_to_json(const SpectralDensityEstimate& spec);

} // namespace gstfm
