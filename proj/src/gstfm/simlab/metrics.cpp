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

#include "gstfm/simlab/metrics.hpp"

#include "gstfm/util/error.hpp"

namespace gstfm {

Region parse_region(const std::string& name) {
  if (name == "all") return Region::all;
  if (name == "interior") return Region::interior;
  throw ConfigError("unknown region '" + name + "' (expected all or interior)");
}

std::string to_string(Region region) { return region == Region::all ? "all" : "interior"; }

ErrorMetrics error_metrics(const LatticeField& chi_hat, const LatticeField& chi_true, std::array<int, 3> lo,
                           std::array<int, 3> hi, bool want_e2) {
  if (chi_hat.n() != chi_true.n() || chi_hat.dims() != chi_true.dims())
    throw DataError("error_metrics: shapes differ (" + std::to_string(chi_hat.n()) + "x" +
                    to_string(chi_hat.dims()) + " vs " + std::to_string(chi_true.n()) + "x" +
                    to_string(chi_true.dims()) + ")");
  const LatticeDims d = chi_true.dims();
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::max(lo[k], 0);
    hi[k] = std::min(hi[k], d[k] - 1);
  }
  ErrorMetrics m;
  if (lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]) throw DataError("error_metrics: region is empty");
  for (int ell = 0; ell < chi_true.n(); ++ell)
    for (int s1 = lo[0]; s1 <= hi[0]; ++s1)
      for (int s2 = lo[1]; s2 <= hi[1]; ++s2)
        for (int t = lo[2]; t <= hi[2]; ++t) {
          const std::size_t i = chi_true.index(ell, s1, s2, t);
          const double c = chi_true.values()[i];
          const double e = chi_hat.values()[i] - c;
          m.sse += e * e;
          m.chi_ss += c * c;
          ++m.points;
        }
  m.e1 = m.sse / static_cast<double>(m.points);
  if (want_e2) {
    if (m.chi_ss == 0.0) throw DataError("E2 undefined: true common component is zero on the region");
    m.e2 = m.sse / m.chi_ss;
  }
  return m;
}

ErrorMetrics error_metrics(const CommonComponentEstimate& est, const LatticeField& chi_true, Region region,
                           bool want_e2) {
  if (region == Region::all) return error_metrics(est.chi_hat, chi_true, want_e2);
  return error_metrics(est.chi_hat, chi_true, est.interior_lo, est.interior_hi, want_e2);
}

ErrorMetrics error_metrics(const LatticeField& chi_hat, const LatticeField& chi_true, bool want_e2) {
  const LatticeDims d = chi_true.dims();
  return error_metrics(chi_hat, chi_true, {0, 0, 0}, {d.s1 - 1, d.s2 - 1, d.t - 1}, want_e2);
}

} // namespace gstfm
