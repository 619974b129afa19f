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

#include "gstfm/qselect/criterion.hpp"

#include <algorithm>
#include <cmath>

#include "gstfm/spectral/spectral_density.hpp"
#include "gstfm/util/error.hpp"

namespace gstfm {

PenaltySpec make_penalty(int n, const LatticeDims& dims, const BandwidthTriple& bw, const KernelTriple& kernels,
                         double c) {
  PenaltySpec p;
  p.n = n;
  p.dims = dims;
  p.bw = bw;
  for (int d = 0; d < 3; ++d) p.smoothness[d] = kernels[d].smoothness();
  p.c = c;
  return p;
}

double penalty_value(const PenaltySpec& spec) {
  if (spec.n < 1) throw ConfigError("penalty needs n >= 1");
  if (!(spec.c >= 0.0)) throw ConfigError("penalty scale c must be non-negative");
  for (int d = 0; d < 3; ++d)
    if (spec.bw.b[d] < 2)
      throw ConfigError("penalty needs every bandwidth >= 2, got B" + std::to_string(d + 1) + "=" +
                        std::to_string(spec.bw.b[d]));
  const double b1 = spec.bw.b[0], b2 = spec.bw.b[1], b3 = spec.bw.b[2];
  const double V = std::sqrt(static_cast<double>(spec.dims.points())) /
                   (std::sqrt(b1 * b2 * b3) * std::log(b1) * std::log(b2) * std::log(b3));
  double rate = 1.0 / spec.n + 1.0 / V;
  double floor_arg = std::min(static_cast<double>(spec.n), V);
  for (int d = 0; d < 3; ++d) {
    const double b = spec.bw.b[d];
    rate += std::pow(b, -spec.smoothness[d]);
    floor_arg = std::min(floor_arg, std::pow(b, spec.smoothness[d]));
  }
  return spec.c * rate * std::log(floor_arg);
}

Eigen::VectorXd clamped_average_eigenvalues(const std::vector<Eigen::VectorXd>& eigenvalues) {
  if (eigenvalues.empty()) throw ConfigError("no eigenvalues");
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(eigenvalues.front().size());
  for (const auto& v : eigenvalues) avg += v.cwiseMax(0.0);
  return avg / static_cast<double>(eigenvalues.size());
}

ICResult information_criteria(const Eigen::VectorXd& clamped_averages, int q_max, double penalty) {
  const Eigen::Index n = clamped_averages.size();
  if (q_max < 0 || q_max > n)
    throw ConfigError("q_max=" + std::to_string(q_max) + " must lie in 0.." + std::to_string(n));
  ICResult res;
  res.penalty = penalty;
  // tail(k) = sum_{j>k}, accumulated from the smallest eigenvalue upwards.
  std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index j = n - 1; j >= 0; --j) tail[j] = tail[j + 1] + clamped_averages[j];
  for (int k = 0; k <= q_max; ++k) {
    const double t = tail[k] / static_cast<double>(n);
    if (!(t > 0.0))
      throw NumericError("degenerate spectrum: eigenvalue tail beyond k=" + std::to_string(k) + " is zero");
    res.eigen_tail_sums.push_back(t);
    res.values.push_back(std::log(t) + k * penalty);
  }
  res.qhat = static_cast<int>(std::min_element(res.values.begin(), res.values.end()) - res.values.begin());
  return res;
}

double information_criterion(const DynamicEigenSystem& sys, int k, const PenaltySpec& pen) {
  const auto res = information_criteria(clamped_average_eigenvalues(sys.eigenvalues), k, penalty_value(pen));
  return res.values.back();
}

ICResult select_q_fixed_c(const LatticeField& field, int q_max, double c, const KernelTriple& kernels,
                          const BandwidthTriple& bw, GridConvention convention, int threads) {
  if (q_max >= field.n())
    throw ConfigError("q_max=" + std::to_string(q_max) + " must be below n=" + std::to_string(field.n()));
  const LatticeField x = ensure_demeaned(field);
  const double p = penalty_value(make_penalty(x.n(), x.dims(), bw, kernels, c));
  const auto spec = estimate_spectral_density(x, kernels, bw, convention, threads);
  return information_criteria(clamped_average_eigenvalues(dynamic_eigenvalues(spec, threads)), q_max, p);
}

} // namespace gstfm
