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

#include "gstfm/spectral/factored_spectrum.hpp"

#include <complex>

#include "gstfm/spectral/spectral_density.hpp"
#include "gstfm/util/error.hpp"
#include "gstfm/util/parallel.hpp"

namespace gstfm {

using cd = std::complex<double>;

Eigen::MatrixXcd FactoredSpectrum::dense(std::size_t g) const {
  const Eigen::MatrixXcd q = basis.cast<cd>();
  return q * cores[g] * q.transpose();
}

FactoredSpectrum estimate_factored_spectrum(const LatticeField& field, const KernelTriple& kernels,
                                            const BandwidthTriple& bw, GridConvention convention, int threads) {
  if (!field.demeaned()) throw ConfigError("estimate_factored_spectrum requires a demeaned field");
  bw.validate(field.dims());
  const std::size_t P = field.points();
  if (P > kMaxFactoredPoints)
    throw ConfigError("factored spectrum needs at most " + std::to_string(kMaxFactoredPoints) + " lattice points");
  const LatticeDims d = field.dims();
  const Eigen::Index n = field.n();

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      field.values().data(), n, static_cast<Eigen::Index>(P));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::Index r = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(P));

  FactoredSpectrum out;
  out.grid = FrequencyGrid(bw, convention);
  out.kernels = kernels;
  out.basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Eigen::MatrixXcd Rc = R.cast<cd>();

  // Point order of the lattice: s1 slowest, t fastest.
  std::vector<std::array<int, 3>> coords(P);
  for (int s1 = 0, p = 0; s1 < d.s1; ++s1)
    for (int s2 = 0; s2 < d.s2; ++s2)
      for (int t = 0; t < d.t; ++t, ++p) coords[p] = {s1, s2, t};

  out.cores.resize(out.grid.size());
  const auto half = out.grid.half();
  parallel_for(half.size(), threads, [&](std::size_t k) {
    const std::size_t g = half[k];
    const auto theta = out.grid.point(g);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
    for (std::size_t a = 0; a < P; ++a)
      for (std::size_t b = 0; b < P; ++b) {
        const int h1 = coords[a][0] - coords[b][0], h2 = coords[a][1] - coords[b][1], h3 = coords[a][2] - coords[b][2];
        if (std::abs(h1) > bw.b[0] || std::abs(h2) > bw.b[1] || std::abs(h3) > bw.b[2]) continue;
        const double w = lag_window_weight(kernels, bw, h1, h2, h3);
        if (w == 0.0) continue;
        W(a, b) = std::polar(w, -(h1 * theta[0] + h2 * theta[1] + h3 * theta[2]));
      }
    Eigen::MatrixXcd core = Rc * W * Rc.transpose() / static_cast<double>(P);
    core = (0.5 * (core + core.adjoint())).eval();
    if (g == out.grid.center()) core = core.real().cast<cd>();
    out.cores[g] = std::move(core);
  });
  for (std::size_t g : half)
    if (g != out.grid.center()) out.cores[out.grid.mirror(g)] = out.cores[g].conjugate();
  return out;
}

} // namespace gstfm
