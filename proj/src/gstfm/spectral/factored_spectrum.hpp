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
#include "gstfm/spectral/kernel.hpp"

namespace gstfm {

/// Lag-window estimate held as Sigma(theta) = Q C(theta) Q^T, with Q an
/// n x r orthonormal basis of the data rows (r <= S1 S2 T). Equal to the dense
/// estimator, but usable when n is far larger than the number of lattice
/// points, e.g. for stacked location series.
struct FactoredSpectrum {
  FrequencyGrid grid;
  KernelTriple kernels{};
  Eigen::MatrixXd basis;                // n x r
  std::vector<Eigen::MatrixXcd> cores;  // r x r Hermitian per grid index

  int n() const { return static_cast<int>(basis.rows()); }
  int rank() const { return static_cast<int>(basis.cols()); }
  Eigen::MatrixXcd dense(std::size_t g) const;
};

/// Largest lattice for which the P x P lag-window matrices are formed.
constexpr std::size_t kMaxFactoredPoints = 2048;

FactoredSpectrum estimate_factored_spectrum(const LatticeField& field, const KernelTriple& kernels,
                                            const BandwidthTriple& bw,
                                            GridConvention convention = GridConvention::dft, int threads = 1);

} // namespace gstfm
