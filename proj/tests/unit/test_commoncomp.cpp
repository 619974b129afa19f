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

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "gstfm/commoncomp/common_component.hpp"
#include "gstfm/commoncomp/projection_filter.hpp"
#include "gstfm/dynpca/eigensystem.hpp"
#include "gstfm/spectral/spectral_density.hpp"
#include "gstfm/util/error.hpp"
#include "support/oracles.hpp"

using namespace gstfm;
using cd = std::complex<double>;

namespace {

const KernelTriple kEp = same_kernel({KernelKind::epanechnikov});

ProjectionFilter scalar_filter(BandwidthTriple bw, const std::function<cd(std::array<double, 3>)>& f) {
  ProjectionFilter pf;
  pf.grid = FrequencyGrid(bw);
  pf.q = 1;
  for (std::size_t g = 0; g < pf.grid.size(); ++g) pf.Khat.push_back(Eigen::MatrixXcd::Constant(1, 1, f(pf.grid.point(g))));
  return pf;
}

// Coefficients straight from the definition.
Eigen::MatrixXcd coefficient_oracle(const ProjectionFilter& pf, int k1, int k2, int k3) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(pf.n(), pf.n());
  for (std::size_t g = 0; g < pf.grid.size(); ++g) {
    const auto th = pf.grid.point(g);
    acc += pf.Khat[g] * std::polar(1.0, k1 * th[0] + k2 * th[1] + k3 * th[2]);
  }
  return acc / static_cast<double>(pf.grid.size());
}

// chi_s = sum_kappa c(kappa) x_{s - kappa}, looping over every point and lag.
std::vector<double> convolution_oracle(const FilterCoefficients& fc, const LatticeField& x) {
  const auto d = x.dims();
  const int n = x.n();
  std::vector<double> out(x.size(), 0.0);
  const auto& m = fc.trunc.m;
  for (int a = 0; a < d.s1; ++a)
    for (int b = 0; b < d.s2; ++b)
      for (int c = 0; c < d.t; ++c)
        for (int k1 = -m[0]; k1 <= m[0]; ++k1)
          for (int k2 = -m[1]; k2 <= m[1]; ++k2)
            for (int k3 = -m[2]; k3 <= m[2]; ++k3) {
              const int a2 = a - k1, b2 = b - k2, c2 = c - k3;
              if (a2 < 0 || a2 >= d.s1 || b2 < 0 || b2 >= d.s2 || c2 < 0 || c2 >= d.t) continue;
              const Eigen::MatrixXd& w = fc.at(k1, k2, k3);
              for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out[x.index(i, a, b, c)] += w(i, j) * x(j, a2, b2, c2);
            }
  return out;
}

double max_diff(const std::vector<double>& a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

} // namespace

TEST_CASE("projection filters are rank-q orthogonal projectors") {
  const LatticeField x = demean(oracle::random_field(5, {5, 5, 6}, 601));
  const auto spec = estimate_spectral_density(x, kEp, BandwidthTriple{{2, 2, 2}});
  for (int q = 1; q <= 4; ++q) {
    const auto pf = projection_filter(eigendecompose_all(spec, q), q);
    CHECK_FALSE(pf.identity);
    for (std::size_t g = 0; g < pf.grid.size(); ++g) {
      const auto& K = pf.Khat[g];
      CHECK(oracle::max_abs(K - K.adjoint()) <= 1e-13);
      CHECK(oracle::max_abs(K * K - K) <= 1e-12);
      CHECK(std::abs(K.trace() - static_cast<double>(q)) <= 1e-12);
      CHECK(oracle::max_abs(pf.Khat[pf.grid.mirror(g)] - K.conjugate()) <= 1e-13);
    }
  }
}

TEST_CASE("full-rank and zero-rank filters are exact") {
  const LatticeField x = demean(oracle::random_field(3, {4, 4, 5}, 602));
  const auto spec = estimate_spectral_density(x, kEp, BandwidthTriple{{1, 1, 2}});
  const auto full = projection_filter(eigendecompose_all(spec, 3), 3);
  CHECK(full.identity);
  const auto fc = filter_coefficients(full, TruncationSpec{{1, 1, 2}});
  for (std::size_t i = 0; i < fc.window.size(); ++i) {
    const auto h = fc.window.offsets(i);
    if (h == std::array<int, 3>{0, 0, 0})
      CHECK(fc.coeffs[i] == Eigen::MatrixXd::Identity(3, 3));
    else
      CHECK(fc.coeffs[i].isZero(0.0));
  }
  const auto none = filter_coefficients(projection_filter(eigendecompose_all(spec, 0), 0), TruncationSpec{{1, 1, 1}});
  for (const auto& c : none.coeffs) CHECK(c.isZero(0.0));
  CHECK_THROWS_AS(projection_filter(eigendecompose_all(spec, 1), 2), ConfigError);
}

TEST_CASE("a pure phase filter gives a single time shift") {
  const int tau = 2;
  const auto pf = scalar_filter(BandwidthTriple{{0, 0, 3}}, [&](auto th) { return std::polar(1.0, -tau * th[2]); });
  const auto fc = filter_coefficients(pf, TruncationSpec{{0, 0, 3}});
  for (int k = -3; k <= 3; ++k) CHECK(std::abs(fc.at(0, 0, k)(0, 0) - (k == tau ? 1.0 : 0.0)) <= 1e-12);

  std::vector<double> v(12);
  for (int t = 0; t < 12; ++t) v[t] = t + 1.0;
  const LatticeField x(1, {1, 1, 12}, v);
  const auto y = apply_filter(fc, x);
  for (int t = 0; t < 12; ++t) CHECK(std::abs(y[t] - (t >= tau ? v[t - tau] : 0.0)) <= 1e-12);
}

TEST_CASE("coefficients agree with the direct transform and invert at full truncation") {
  const LatticeField x = demean(oracle::random_field(4, {5, 6, 7}, 603));
  const BandwidthTriple bw{{2, 2, 3}};
  for (GridConvention conv : {GridConvention::dft, GridConvention::endpoint}) {
    const auto pf = projection_filter(eigendecompose_all(estimate_spectral_density(x, kEp, bw, conv), 2), 2);
    const auto fc = filter_coefficients(pf, TruncationSpec{bw.b});
    for (std::size_t i = 0; i < fc.window.size(); ++i) {
      const auto h = fc.window.offsets(i);
      const Eigen::MatrixXcd ref = coefficient_oracle(pf, h[0], h[1], h[2]);
      CHECK((ref.real() - fc.coeffs[i]).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(ref.imag().cwiseAbs().maxCoeff() <= 1e-12);
    }
    if (conv != GridConvention::dft) continue;
    // Summing the coefficients back with exp(-i <kappa, theta>) recovers K, a projector.
    for (std::size_t g = 0; g < pf.grid.size(); ++g) {
      const auto th = pf.grid.point(g);
      Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(4, 4);
      for (std::size_t i = 0; i < fc.window.size(); ++i) {
        const auto h = fc.window.offsets(i);
        K += fc.coeffs[i].cast<cd>() * std::polar(1.0, -(h[0] * th[0] + h[1] * th[1] + h[2] * th[2]));
      }
      CHECK(oracle::max_abs(K - pf.Khat[g]) <= 1e-12);
      CHECK(oracle::max_abs(K * K - K) <= 1e-11);
    }
  }
}

TEST_CASE("complex lag coefficients fail the reality check") {
  const auto pf = scalar_filter(BandwidthTriple{{0, 1, 1}}, [](auto) { return cd(0.0, 1.0); });
  CHECK_THROWS_AS(filter_coefficients(pf, TruncationSpec{{0, 1, 1}}), NumericError);
}

TEST_CASE("truncation ranges at corners and centre") {
  const LatticeDims d{5, 5, 5};
  const TruncationSpec m{{2, 1, 2}};
  CHECK(truncation_ranges({0, 0, 0}, d, m) == std::array<int, 6>{-2, 0, -1, 0, -2, 0});
  CHECK(truncation_ranges({4, 4, 4}, d, m) == std::array<int, 6>{0, 2, 0, 1, 0, 2});
  CHECK(truncation_ranges({2, 2, 1}, d, m) == std::array<int, 6>{-2, 2, -1, 1, -2, 1});
  const TruncationSpec too_long{{3, 1, 1}};
  CHECK_THROWS_AS(too_long.validate(BandwidthTriple{{2, 2, 2}}, d), ConfigError);
}

TEST_CASE("q equal to n reproduces the demeaned data exactly") {
  const LatticeField raw = oracle::random_field(3, {6, 5, 7}, 604, 2.0);
  const LatticeField x = demean(raw);
  const auto est = estimate_common_component(raw, 3, kEp, BandwidthTriple{{2, 2, 2}}, TruncationSpec{{2, 2, 2}});
  CHECK(std::equal(x.values().begin(), x.values().end(), est.chi_hat.values().begin()));
  const LatticeField wide = oracle::random_field(30, {2, 2, 3}, 605);
  const auto fac = estimate_common_component(wide, 30, kEp, BandwidthTriple{{1, 1, 1}}, TruncationSpec{{1, 1, 1}});
  CHECK(fac.route == SpectralRoute::factored);
  const LatticeField wx = demean(wide);
  CHECK(std::equal(wx.values().begin(), wx.values().end(), fac.chi_hat.values().begin()));
}

TEST_CASE("q zero and a zero field give zeros") {
  const LatticeField x = oracle::random_field(3, {5, 5, 5}, 606);
  const auto est = estimate_common_component(x, 0, kEp, BandwidthTriple{{2, 2, 2}}, TruncationSpec{{1, 1, 1}});
  for (double v : est.chi_hat.values()) CHECK(v == 0.0);
  const LatticeField zero = LatticeField::zeros(3, {5, 5, 5});
  const auto z = estimate_common_component(zero, 1, kEp, BandwidthTriple{{2, 2, 2}}, TruncationSpec{{2, 2, 2}});
  for (double v : z.chi_hat.values()) CHECK(v == 0.0);
  REQUIRE(z.warnings.size() == 1);
  CHECK(z.warnings[0].find("degenerate spectrum") != std::string::npos);
  CHECK_THROWS_AS(estimate_common_component(x, 4, kEp, BandwidthTriple{{2, 2, 2}}, TruncationSpec{{1, 1, 1}}),
                  ConfigError);
}

TEST_CASE("applying a fixed filter is linear") {
  const LatticeField a = demean(oracle::random_field(4, {5, 6, 6}, 607));
  const LatticeField b = demean(oracle::random_field(4, {5, 6, 6}, 608));
  const auto pf = projection_filter(eigendecompose_all(estimate_spectral_density(a, kEp, BandwidthTriple{{2, 2, 2}}), 2), 2);
  const auto fc = filter_coefficients(pf, TruncationSpec{{2, 1, 2}});
  std::vector<double> mix(a.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0 * a.values()[i] - 0.5 * b.values()[i];
  const auto ya = apply_filter(fc, a), yb = apply_filter(fc, b);
  const auto ym = apply_filter(fc, LatticeField(4, a.dims(), mix));
  double err = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) err = std::max(err, std::abs(ym[i] - (2.0 * ya[i] - 0.5 * yb[i])));
  CHECK(err <= 1e-12);
}

TEST_CASE("filtering matches the direct convolution sum") {
  const LatticeField x = demean(oracle::random_field(3, {6, 5, 8}, 609));
  const auto pf = projection_filter(eigendecompose_all(estimate_spectral_density(x, kEp, BandwidthTriple{{2, 2, 3}}), 1), 1);
  for (const TruncationSpec& m : {TruncationSpec{{2, 2, 3}}, TruncationSpec{{1, 0, 2}}}) {
    const auto fc = filter_coefficients(pf, m);
    const auto ref = convolution_oracle(fc, x);
    CHECK(max_diff(ref, apply_filter(fc, x, 1)) <= 1e-12);
    CHECK(apply_filter(fc, x, 1) == apply_filter(fc, x, 3));
  }
  const auto est = estimate_common_component(x, 1, kEp, BandwidthTriple{{2, 2, 3}}, TruncationSpec{{2, 2, 3}});
  CHECK(max_diff(convolution_oracle(filter_coefficients(pf, TruncationSpec{{2, 2, 3}}), x), est.chi_hat.values()) <=
        1e-12);
}

TEST_CASE("factored and dense routes agree") {
  const LatticeField x = oracle::random_field(18, {2, 3, 3}, 610);
  const BandwidthTriple bw{{1, 1, 1}};
  for (int q : {1, 3}) {
    const auto d = estimate_common_component(x, q, kEp, bw, TruncationSpec{{1, 1, 1}}, GridConvention::dft, 1,
                                             SpectralRoute::dense);
    const auto f = estimate_common_component(x, q, kEp, bw, TruncationSpec{{1, 1, 1}}, GridConvention::dft, 1,
                                             SpectralRoute::factored);
    CHECK(f.route == SpectralRoute::factored);
    CHECK(max_diff(std::vector<double>(d.chi_hat.values().begin(), d.chi_hat.values().end()), f.chi_hat.values()) <=
          1e-9 * max_abs(d.chi_hat.values()));
  }
}

TEST_CASE("interior bounds and settings echo") {
  const LatticeField x = oracle::random_field(2, {8, 6, 10}, 611);
  const auto est = estimate_common_component(x, 1, kEp, BandwidthTriple{{2, 2, 3}}, TruncationSpec{{2, 1, 3}});
  CHECK(est.interior_lo == std::array<int, 3>{2, 1, 3});
  CHECK(est.interior_hi == std::array<int, 3>{5, 4, 6});
  CHECK(est.interior_points() == 4u * 4u * 4u);
  CHECK(est.interior(2, 1, 3));
  CHECK_FALSE(est.interior(1, 1, 3));
  const auto doc = common_settings_json(est);
  CHECK(doc["interior"]["lo"] == std::vector<int>{3, 2, 4});
  CHECK(doc["interior"]["hi"] == std::vector<int>{6, 5, 7});
  CHECK(doc["route"] == "dense");
  CHECK(doc["q"] == 1);
}
