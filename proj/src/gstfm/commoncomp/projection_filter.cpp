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

#include "gstfm/commoncomp/projection_filter.hpp"

#include <algorithm>
#include <complex>

#include "gstfm/spectral/dft_stage.hpp"
#include "gstfm/util/error.hpp"
#include "gstfm/util/parallel.hpp"

namespace gstfm {

using cd = std::complex<double>;

ProjectionFilter projection_filter(const DynamicEigenSystem& sys, int q) {
  const int n = sys.n();
  if (q < 0 || q > sys.q_keep)
    throw ConfigError("q=" + std::to_string(q) + " exceeds the " + std::to_string(sys.q_keep) +
                      " eigenvectors kept");
  ProjectionFilter pf;
  pf.grid = sys.grid;
  pf.q = q;
  pf.identity = q == n;
  pf.Khat.resize(sys.grid.size());
  const std::size_t c = sys.grid.center();
  for (std::size_t g = c; g < sys.grid.size(); ++g) {
    Eigen::MatrixXcd K;
    if (pf.identity) {
      K = Eigen::MatrixXcd::Identity(n, n);
    } else if (q == 0) {
      K = Eigen::MatrixXcd::Zero(n, n);
    } else {
      const auto P = sys.eigenvectors[g].topRows(q);
      K = P.adjoint() * P;
      K = (0.5 * (K + K.adjoint())).eval();
      if (g == c) K = K.real().cast<cd>();
    }
    pf.Khat[g] = std::move(K);
  }
  for (std::size_t g = c + 1; g < sys.grid.size(); ++g) pf.Khat[sys.grid.mirror(g)] = pf.Khat[g].conjugate();
  return pf;
}

void TruncationSpec::validate(const BandwidthTriple& bw, const LatticeDims& dims) const {
  for (int d = 0; d < 3; ++d) {
    if (m[d] < 0 || m[d] > bw.b[d] || m[d] >= dims[d])
      throw ConfigError("truncation M" + std::to_string(d + 1) + "=" + std::to_string(m[d]) +
                        " must satisfy 0 <= M <= B=" + std::to_string(bw.b[d]) + " and M < " +
                        std::to_string(dims[d]));
  }
}

FilterCoefficients filter_coefficients(const ProjectionFilter& pf, const TruncationSpec& trunc) {
  const BandwidthTriple& bw = pf.grid.bandwidths();
  for (int d = 0; d < 3; ++d)
    if (trunc.m[d] < 0 || trunc.m[d] > bw.b[d])
      throw ConfigError("truncation M" + std::to_string(d + 1) + "=" + std::to_string(trunc.m[d]) +
                        " must satisfy 0 <= M <= B=" + std::to_string(bw.b[d]));
  const int n = pf.n();
  FilterCoefficients out;
  out.trunc = trunc;
  out.window = IndexBox(trunc.m);
  out.coeffs.resize(out.window.size());

  if (pf.identity) {
    for (std::size_t i = 0; i < out.window.size(); ++i) out.coeffs[i] = Eigen::MatrixXd::Zero(n, n);
    out.coeffs[out.window.center()] = Eigen::MatrixXd::Identity(n, n);
    return out;
  }

  const IndexBox& box = pf.grid.box();
  auto all = [](std::size_t) { return true; };
  auto inside = [&](std::size_t idx) {
    const auto k = box.offsets(idx);
    return out.window.contains(k[0], k[1], k[2]);
  };
  // h * theta(k) is symmetric in (h, k) on both grid conventions, so the
  // forward stage doubles as the inverse transform with sign +1.
  auto s1 = detail::dft_stage(pf.Khat, pf.grid, 0, 1.0, all);
  auto s2 = detail::dft_stage(s1, pf.grid, 1, 1.0, all);
  s1.clear();
  auto s3 = detail::dft_stage(s2, pf.grid, 2, 1.0, inside);
  s2.clear();

  const double G = static_cast<double>(pf.grid.size());
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    if (!inside(idx)) continue;
    const auto k = box.offsets(idx);
    const Eigen::MatrixXcd& c = s3[idx];
    max_re = std::max(max_re, c.real().cwiseAbs().maxCoeff() / G);
    max_im = std::max(max_im, c.imag().cwiseAbs().maxCoeff() / G);
    out.coeffs[out.window.flat(k[0], k[1], k[2])] = c.real() / G;
  }
  if (max_im > 1e-9 * max_re)
    throw NumericError("filter coefficients are not real (max |Im| = " + std::to_string(max_im) +
                       ", max |Re| = " + std::to_string(max_re) + ")");
  return out;
}

std::array<int, 6> truncation_ranges(std::array<int, 3> point, const LatticeDims& dims, const TruncationSpec& trunc) {
  std::array<int, 6> r{};
  for (int d = 0; d < 3; ++d) {
    r[2 * d] = std::max(point[d] - (dims[d] - 1), -trunc.m[d]);
    r[2 * d + 1] = std::min(point[d], trunc.m[d]);
  }
  return r;
}

std::vector<double> apply_filter(const FilterCoefficients& coeffs, const LatticeField& field, int threads) {
  const int n = field.n();
  if (coeffs.n() != n)
    throw ConfigError("filter has " + std::to_string(coeffs.n()) + " series, field has " + std::to_string(n));
  const LatticeDims d = field.dims();
  const std::size_t P = field.points();
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> x(field.values().data(), n, static_cast<Eigen::Index>(P));
  std::vector<double> out(field.size(), 0.0);
  Eigen::Map<RowMat> y(out.data(), n, static_cast<Eigen::Index>(P));

  // One work item per output slab s1, so the products never depend on the thread count.
  parallel_for(static_cast<std::size_t>(d.s1), threads, [&](std::size_t w) {
    const int s1_lo = static_cast<int>(w);
    const int s1_hi = s1_lo + 1;
    RowMat gathered, product;
    for (std::size_t idx = 0; idx < coeffs.window.size(); ++idx) {
      const auto k = coeffs.window.offsets(idx);
      const Eigen::MatrixXd& C = coeffs.coeffs[idx];
      if (C.isZero(0.0)) continue;
      // Output points s with s - k on the lattice.
      const int a1 = std::max(s1_lo, k[0]), b1 = std::min(s1_hi, d.s1 + k[0]);
      const int a2 = std::max(0, k[1]), b2 = std::min(d.s2, d.s2 + k[1]);
      const int a3 = std::max(0, k[2]), b3 = std::min(d.t, d.t + k[2]);
      if (a1 >= b1 || a2 >= b2 || a3 >= b3) continue;
      const int e2 = b2 - a2, e3 = b3 - a3;
      const Eigen::Index cnt = static_cast<Eigen::Index>(b1 - a1) * e2 * e3;
      gathered.resize(n, cnt);
      for (int ell = 0; ell < n; ++ell) {
        Eigen::Index col = 0;
        for (int s1 = a1; s1 < b1; ++s1)
          for (int s2 = a2; s2 < b2; ++s2) {
            const double* src = x.data() + field.index(ell, s1 - k[0], s2 - k[1], a3 - k[2]);
            std::copy(src, src + e3, &gathered(ell, col));
            col += e3;
          }
      }
      product.noalias() = C * gathered;
      for (int ell = 0; ell < n; ++ell) {
        Eigen::Index col = 0;
        for (int s1 = a1; s1 < b1; ++s1)
          for (int s2 = a2; s2 < b2; ++s2) {
            double* dst = &y(ell, static_cast<Eigen::Index>(field.index(0, s1, s2, a3)));
            const double* src = &product(ell, col);
            for (int t = 0; t < e3; ++t) dst[t] += src[t];
            col += e3;
          }
      }
    }
  });
  return out;
}

} // namespace gstfm
