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

#include "gstfm/spectral/spectral_density.hpp"

#include <complex>

#include <json.hpp>

#include "gstfm/spectral/dft_stage.hpp"
#include "gstfm/util/error.hpp"

namespace gstfm {
namespace {

using cd = std::complex<double>;
using detail::dft_stage;

} // namespace

double lag_window_weight(const KernelTriple& kernels, const BandwidthTriple& bw, int h1, int h2, int h3) {
  const int h[3] = {h1, h2, h3};
  double w = 1.0;
  for (int d = 0; d < 3; ++d) {
    if (bw.b[d] == 0) {
      if (h[d] != 0) return 0.0;
      continue;
    }
    w *= kernel_eval(kernels[d], static_cast<double>(h[d]) / bw.b[d]);
  }
  return w;
}

SpectralDensityEstimate spectral_density_from_autocov(AutocovarianceSet autocov, const KernelTriple& kernels,
                                                      GridConvention convention) {
  BandwidthTriple bw{{autocov.window.radius(0), autocov.window.radius(1), autocov.window.radius(2)}};
  SpectralDensityEstimate out;
  out.grid = FrequencyGrid(bw, convention);
  out.kernels = kernels;
  const IndexBox& box = out.grid.box();

  std::vector<Eigen::MatrixXd> weighted(box.size());
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const auto h = box.offsets(idx);
    weighted[idx] = lag_window_weight(kernels, bw, h[0], h[1], h[2]) * autocov.matrices[idx];
  }
  const std::size_t center = box.center();
  auto all = [](std::size_t) { return true; };
  auto stage1 = dft_stage(weighted, out.grid, 0, -1.0, all);
  weighted.clear();
  auto stage2 = dft_stage(stage1, out.grid, 1, -1.0, all);
  stage1.clear();
  out.matrices = dft_stage(stage2, out.grid, 2, -1.0, [&](std::size_t idx) { return idx >= center; });
  stage2.clear();

  for (std::size_t idx = center; idx < box.size(); ++idx) {
    Eigen::MatrixXcd& m = out.matrices[idx];
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = cd(m(i, i).real(), 0.0);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const cd v = 0.5 * (m(i, j) + std::conj(m(j, i)));
        m(i, j) = v;
        m(j, i) = std::conj(v);
      }
    }
    if (idx == center) m = m.real().cast<cd>();
  }
  for (std::size_t idx = center + 1; idx < box.size(); ++idx)
    out.matrices[box.mirror(idx)] = out.matrices[idx].conjugate();
  out.source_autocov = std::move(autocov);
  return out;
}

SpectralDensityEstimate estimate_spectral_density(const LatticeField& field, const KernelTriple& kernels,
                                                  const BandwidthTriple& bw, GridConvention convention, int threads) {
  return spectral_density_from_autocov(sample_autocovariance(field, bw, threads), kernels, convention);
}

SpectralDensityEstimate principal_submatrix(const SpectralDensityEstimate& spec, std::span<const int> order) {
  const int n = spec.n();
  for (int i : order)
    if (i < 0 || i >= n) throw ConfigError("principal_submatrix: index out of range");
  const Eigen::Index m = static_cast<Eigen::Index>(order.size());
  SpectralDensityEstimate out;
  out.grid = spec.grid;
  out.kernels = spec.kernels;
  out.matrices.resize(spec.matrices.size());
  for (std::size_t g = 0; g < spec.matrices.size(); ++g) {
    Eigen::MatrixXcd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = spec.matrices[g](order[i], order[j]);
    out.matrices[g] = std::move(sub);
  }
  out.source_autocov.window = spec.source_autocov.window;
  for (const auto& gamma : spec.source_autocov.matrices) {
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = gamma(order[i], order[j]);
    out.source_autocov.matrices.push_back(std::move(sub));
  }
  return out;
}

std::string spectral_to_json(const SpectralDensityEstimate& spec) {
  nlohmann::json doc;
  const auto& bw = spec.grid.bandwidths();
  doc["n"] = spec.n();
  doc["bandwidths"] = bw.b;
  doc["grid_convention"] = to_string(spec.grid.convention());
  doc["kernels"] = {spec.kernels[0].name(), spec.kernels[1].name(), spec.kernels[2].name()};
  doc["G"] = spec.grid.size();
  nlohmann::json freqs = nlohmann::json::array();
  for (std::size_t g = 0; g < spec.matrices.size(); ++g) {
    const auto h = spec.grid.box().offsets(g);
    const auto theta = spec.grid.point(g);
    std::vector<double> re, im;
    const auto& m = spec.matrices[g];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        re.push_back(m(i, j).real());
        im.push_back(m(i, j).imag());
      }
    freqs.push_back({{"h", h}, {"theta", theta}, {"re", re}, {"im", im}});
  }
  doc["frequencies"] = std::move(freqs);
  return doc.dump();
}

} // namespace gstfm
