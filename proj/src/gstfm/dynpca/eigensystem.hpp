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
#include "gstfm/spectral/factored_spectrum.hpp"
#include "gstfm/spectral/spectral_density.hpp"

namespace gstfm {

/// Per-frequency eigenvalues (all n, descending) and the leading q_keep
/// eigenvector rows p_j(theta), with p_j(theta) Sigma(theta) = lambda_j p_j(theta).
struct DynamicEigenSystem {
  FrequencyGrid grid;
  int q_keep = 0;
  std::vector<Eigen::VectorXd> eigenvalues;
  std::vector<Eigen::MatrixXcd> eigenvectors;  // q_keep x n per grid index; empty when q_keep = 0

  int n() const { return eigenvalues.empty() ? 0 : static_cast<int>(eigenvalues.front().size()); }
};

/// Hermitian eigendecomposition at every grid frequency. Each row's
/// largest-modulus entry is made real positive; rows at -theta are the
/// conjugates of those at theta.
DynamicEigenSystem eigendecompose_all(const SpectralDensityEstimate& spec, int q_keep, int threads = 1);

/// Same from a factored estimate; eigenvalues beyond its rank are zero.
DynamicEigenSystem eigendecompose_all(const FactoredSpectrum& spec, int q_keep, int threads = 1);

/// Eigenvalues only, per grid index (descending).
std::vector<Eigen::VectorXd> dynamic_eigenvalues(const SpectralDensityEstimate& spec, int threads = 1);

/// (1/G) sum over the grid of lambda_j(theta), j = 1..top_k.
Eigen::VectorXd averaged_eigenvalues(const DynamicEigenSystem& sys, int top_k);
Eigen::VectorXd averaged_eigenvalues(const std::vector<Eigen::VectorXd>& eigenvalues, int top_k);

/// Row per m: averaged top_k eigenvalues of the estimate restricted to the
/// first m series (principal submatrices of the full estimate).
Eigen::MatrixXd eigengap_curve(const LatticeField& field, std::span<const int> m_values, int top_k,
                               const KernelTriple& kernels, const BandwidthTriple& bw,
                               GridConvention convention = GridConvention::dft, int threads = 1);

/// Same for the stacked location series of the first m series (purely
/// temporal analysis with N = m*S1*S2 series).
Eigen::MatrixXd stacked_eigengap_curve(const LatticeField& field, std::span<const int> m_values, int top_k,
                                       KernelSpec kernel, int temporal_bandwidth,
                                       GridConvention convention = GridConvention::dft, int threads = 1);

/// CSV with header m,lambda_1,...,lambda_k.
std::string eigengap_to_csv(std::span<const int> m_values, const Eigen::MatrixXd& curve);

} // namespace gstfm
