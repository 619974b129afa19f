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

#include "gstfm/commoncomp/common_component.hpp"

#include <complex>

#include "gstfm/dynpca/eigensystem.hpp"
#include "gstfm/spectral/factored_spectrum.hpp"
#include "gstfm/spectral/spectral_density.hpp"
#include "gstfm/util/error.hpp"
#include "gstfm/util/parallel.hpp"

namespace gstfm {
namespace {

using cd = std::complex<double>;
using RowMatC = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

bool all_nonpositive(const std::vector<Eigen::VectorXd>& eigenvalues) {
  for (const auto& v : eigenvalues)
    if (v.size() > 0 && v.maxCoeff() > 0.0) return false;
  return true;
}

// z(s) = sum_{|k| <= M, s - k on the line} exp(i k theta) y(s - k) along one
// axis of a q x P row-major block laid out with t fastest.
RowMatC window_pass(const RowMatC& y, const LatticeDims& d, int axis, int M, double theta) {
  if (M == 0) return y;
  const int extent = d[axis];
  const std::size_t stride = axis == 2 ? 1 : (axis == 1 ? static_cast<std::size_t>(d.t)
                                                        : static_cast<std::size_t>(d.t) * d.s2);
  std::vector<cd> w(2 * M + 1);
  for (int k = -M; k <= M; ++k) w[k + M] = std::polar(1.0, k * theta);
  RowMatC z = RowMatC::Zero(y.rows(), y.cols());
  const std::size_t P = d.points();
  for (Eigen::Index r = 0; r < y.rows(); ++r)
    for (std::size_t p = 0; p < P; ++p) {
      const int s = static_cast<int>((p / stride) % extent);
      const int lo = std::max(-M, s - (extent - 1)), hi = std::min(M, s);
      cd acc = 0.0;
      for (int k = lo; k <= hi; ++k) acc += w[k + M] * y(r, static_cast<Eigen::Index>(p - k * stride));
      z(r, static_cast<Eigen::Index>(p)) = acc;
    }
  return z;
}

std::vector<double> factored_common(const LatticeField& x, int q, const KernelTriple& kernels,
                                    const BandwidthTriple& bw, const TruncationSpec& trunc, GridConvention convention,
                                    int threads, std::vector<std::string>& warnings) {
  if (q == x.n()) return std::vector<double>(x.values().begin(), x.values().end());
  const auto spec = estimate_factored_spectrum(x, kernels, bw, convention, threads);
  if (q > spec.rank())
    throw ConfigError("q=" + std::to_string(q) + " exceeds the rank " + std::to_string(spec.rank()) +
                      " of the factored spectral estimate");
  const auto sys = eigendecompose_all(spec, q, threads);
  if (all_nonpositive(sys.eigenvalues)) warnings.push_back("degenerate spectrum: estimated spectral density is zero");
  const int n = x.n();
  const LatticeDims d = x.dims();
  const auto P = static_cast<Eigen::Index>(x.points());
  std::vector<double> out(x.size(), 0.0);
  if (q == 0) return out;

  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> X(x.values().data(), n, P);
  const auto half = sys.grid.half();
  std::vector<RowMat> parts(half.size());
  parallel_for(half.size(), threads, [&](std::size_t i) {
    const std::size_t g = half[i];
    const Eigen::MatrixXcd& rows = sys.eigenvectors[g];  // q x n
    RowMatC y = rows * X.cast<cd>();
    const auto theta = sys.grid.point(g);
    for (int axis = 0; axis < 3; ++axis) y = window_pass(y, d, axis, trunc.m[axis], theta[axis]);
    const double weight = g == sys.grid.center() ? 1.0 : 2.0;
    parts[i] = weight * (rows.adjoint() * y).real();
  });
  Eigen::Map<RowMat> chi(out.data(), n, P);
  for (const auto& part : parts) chi += part;
  chi /= static_cast<double>(sys.grid.size());
  return out;
}

} // namespace

std::string to_string(SpectralRoute route) {
  switch (route) {
    case SpectralRoute::automatic: return "automatic";
    case SpectralRoute::dense: return "dense";
    case SpectralRoute::factored: return "factored";
  }
  return "automatic";
}

std::size_t CommonComponentEstimate::interior_points() const {
  std::size_t count = 1;
  for (int d = 0; d < 3; ++d) {
    if (interior_hi[d] < interior_lo[d]) return 0;
    count *= static_cast<std::size_t>(interior_hi[d] - interior_lo[d] + 1);
  }
  return count;
}

void set_interior_bounds(CommonComponentEstimate& est, const LatticeDims& dims, const TruncationSpec& trunc) {
  for (int d = 0; d < 3; ++d) {
    est.interior_lo[d] = trunc.m[d];
    est.interior_hi[d] = dims[d] - 1 - trunc.m[d];
  }
}

CommonComponentEstimate estimate_common_component(const LatticeField& field, int q, const KernelTriple& kernels,
                                                  const BandwidthTriple& bw, const TruncationSpec& trunc,
                                                  GridConvention convention, int threads, SpectralRoute route) {
  if (q < 0 || q > field.n())
    throw ConfigError("q=" + std::to_string(q) + " must lie in 0.." + std::to_string(field.n()));
  bw.validate(field.dims());
  trunc.validate(bw, field.dims());
  const LatticeField x = ensure_demeaned(field);

  CommonComponentEstimate est;
  est.q = q;
  est.bw = bw;
  est.trunc = trunc;
  est.kernels = kernels;
  est.convention = convention;
  if (route == SpectralRoute::automatic)
    route = x.points() < static_cast<std::size_t>(x.n()) && x.points() <= kMaxFactoredPoints ? SpectralRoute::factored
                                                                                            : SpectralRoute::dense;
  est.route = route;

  std::vector<double> chi;
  if (route == SpectralRoute::factored) {
    chi = factored_common(x, q, kernels, bw, trunc, convention, threads, est.warnings);
  } else {
    const auto spec = estimate_spectral_density(x, kernels, bw, convention, threads);
    const auto sys = eigendecompose_all(spec, q, threads);
    if (all_nonpositive(sys.eigenvalues))
      est.warnings.push_back("degenerate spectrum: estimated spectral density is zero");
    const auto pf = projection_filter(sys, q);
    chi = apply_filter(filter_coefficients(pf, trunc), x, threads);
  }
  est.chi_hat = LatticeField(x.n(), x.dims(), std::move(chi));
  set_interior_bounds(est, x.dims(), trunc);
  return est;
}

nlohmann::json common_settings_json(const CommonComponentEstimate& est) {
  nlohmann::json doc;
  doc["q"] = est.q;
  doc["n"] = est.chi_hat.n();
  const auto& d = est.chi_hat.dims();
  doc["dims"] = {d.s1, d.s2, d.t};
  doc["bandwidths"] = est.bw.b;
  doc["truncation"] = est.trunc.m;
  doc["kernels"] = {est.kernels[0].name(), est.kernels[1].name(), est.kernels[2].name()};
  doc["grid_convention"] = to_string(est.convention);
  doc["route"] = to_string(est.route);
  std::array<int, 3> lo{}, hi{};
  for (int k = 0; k < 3; ++k) {
    lo[k] = est.interior_lo[k] + 1;
    hi[k] = est.interior_hi[k] + 1;
  }
  doc["interior"] = {{"lo", lo}, {"hi", hi}, {"points", est.interior_points()}};
  doc["warnings"] = est.warnings;
  return doc;
}

} // namespace gstfm
