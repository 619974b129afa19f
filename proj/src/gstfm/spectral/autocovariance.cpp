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

#include "gstfm/spectral/autocovariance.hpp"

#include <algorithm>

#include "gstfm/util/error.hpp"
#include "gstfm/util/parallel.hpp"

namespace gstfm {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Copies the lattice box [lo, hi) of every series into the rows of `out`.
void gather_box(const LatticeField& field, const std::array<int, 3>& lo, const std::array<int, 3>& hi, RowMatrix& out) {
  const int len1 = hi[0] - lo[0], len2 = hi[1] - lo[1], len3 = hi[2] - lo[2];
  out.resize(field.n(), static_cast<Eigen::Index>(len1) * len2 * len3);
  for (int ell = 0; ell < field.n(); ++ell) {
    double* dst = out.row(ell).data();
    for (int s1 = lo[0]; s1 < hi[0]; ++s1)
      for (int s2 = lo[1]; s2 < hi[1]; ++s2) {
        const double* src = field.values().data() + field.index(ell, s1, s2, lo[2]);
        dst = std::copy(src, src + len3, dst);
      }
  }
}

} // namespace

Eigen::MatrixXd lag_product(const LatticeField& field, SpatioTemporalLag h) {
  const LatticeDims d = field.dims();
  std::array<int, 3> lo{}, hi{}, lo_shift{}, hi_shift{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(0, h[a]);
    hi[a] = d[a] + std::min(0, h[a]);
    if (hi[a] <= lo[a]) return Eigen::MatrixXd::Zero(field.n(), field.n());
    lo_shift[a] = lo[a] - h[a];
    hi_shift[a] = hi[a] - h[a];
  }
  RowMatrix a, b;
  gather_box(field, lo, hi, a);
  gather_box(field, lo_shift, hi_shift, b);
  Eigen::MatrixXd out = a * b.transpose();
  out /= static_cast<double>(field.points());
  return out;
}

AutocovarianceSet sample_autocovariance(const LatticeField& field, const BandwidthTriple& window, int threads) {
  if (!field.demeaned()) throw ConfigError("sample_autocovariance requires a demeaned field");
  window.validate(field.dims());
  AutocovarianceSet out;
  out.window = IndexBox(window.b);
  out.matrices.resize(out.window.size());
  const std::size_t center = out.window.center();
  const std::size_t upper = out.window.size() - center;
  parallel_for(upper, threads, [&](std::size_t k) {
    const std::size_t idx = center + k;
    const auto h = out.window.offsets(idx);
    out.matrices[idx] = lag_product(field, {h[0], h[1], h[2]});
  });
  Eigen::MatrixXd& zero_lag = out.matrices[center];
  zero_lag = (0.5 * (zero_lag + zero_lag.transpose())).eval();
  for (std::size_t idx = center + 1; idx < out.window.size(); ++idx)
    out.matrices[out.window.mirror(idx)] = out.matrices[idx].transpose();
  return out;
}

} // namespace gstfm
