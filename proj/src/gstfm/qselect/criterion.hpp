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
#include "gstfm/spectral/kernel.hpp"

namespace gstfm {

/// Inputs of the factor-number penalty
///   p = (1/n + sum_d B_d^-v_d + 1/V) log min(n, B_1^v_1, B_2^v_2, B_3^v_3, V),
///   V = sqrt(S1 S2 T) / (sqrt(B1 B2 B3) log B1 log B2 log B3),
/// scaled by c.
struct PenaltySpec {
  int n = 1;
  LatticeDims dims{};
  BandwidthTriple bw{};
  std::array<double, 3> smoothness{2.0, 2.0, 2.0};
  double c = 1.0;
};

PenaltySpec make_penalty(int n, const LatticeDims& dims, const BandwidthTriple& bw, const KernelTriple& kernels,
                         double c = 1.0);

/// Throws ConfigError if some bandwidth is below 2 or c is negative.
double penalty_value(const PenaltySpec& spec);

struct ICResult {
  std::vector<double> values;           // IC(k), k = 0..q_max
  std::vector<double> eigen_tail_sums;  // (1/n) sum_{j>k} averaged clamped eigenvalue
  int qhat = 0;
  double penalty = 0.0;
};

/// Grid average of max(lambda_j, 0) for every j.
Eigen::VectorXd clamped_average_eigenvalues(const std::vector<Eigen::VectorXd>& eigenvalues);

/// IC(k) = log tail(k) + k * penalty for k = 0..q_max from the clamped
/// averages; q-hat is the first minimiser. Throws NumericError when a tail
/// sum is not positive.
ICResult information_criteria(const Eigen::VectorXd& clamped_averages, int q_max, double penalty);

/// IC(k) for a single k.
double information_criterion(const DynamicEigenSystem& sys, int k, const PenaltySpec& pen);

/// Spectral estimate, eigenvalues and IC over k = 0..q_max.
ICResult select_q_fixed_c(const LatticeField& field, int q_max, double c, const KernelTriple& kernels,
                          const BandwidthTriple& bw, GridConvention convention = GridConvention::dft,
                          int threads = 1);

} // namespace gstfm
