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
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "gstfm/spectral/autocovariance.hpp"
#include "gstfm/spectral/factored_spectrum.hpp"
#include "gstfm/spectral/frequency_grid.hpp"
#include "gstfm/spectral/kernel.hpp"
#include "gstfm/spectral/spectral_density.hpp"
#include "gstfm/util/error.hpp"
#include "support/oracles.hpp"

using namespace gstfm;
using std::numbers::pi;

namespace {

const KernelTriple kEp = same_kernel({KernelKind::epanechnikov});
const KernelTriple kBart = same_kernel({KernelKind::bartlett});

double spectral_scale(const SpectralDensityEstimate& s) {
  double m = 0.0;
  for (const auto& a : s.matrices) m = std::max(m, oracle::max_abs(a));
  return m;
}

} // namespace

TEST_CASE("kernel values and orders of contact") {
  const KernelSpec ep{KernelKind::epanechnikov}, ba{KernelKind::bartlett}, tr{KernelKind::truncated};
  CHECK(kernel_eval(ep, 0.0) == 1.0);
  CHECK(kernel_eval(ep, 0.5) == 0.75);
  CHECK(kernel_eval(ep, -1.0) == 0.0);
  CHECK(kernel_eval(ep, 1.5) == 0.0);
  CHECK(kernel_eval(ba, 0.25) == 0.75);
  CHECK(kernel_eval(ba, -0.5) == 0.5);
  CHECK(kernel_eval(tr, 1.0) == 1.0);
  CHECK(kernel_eval(tr, -1.01) == 0.0);
  CHECK(ep.smoothness() == 2.0);
  CHECK(ba.smoothness() == 1.0);
  CHECK(tr.smoothness() > 100.0);
  CHECK(parse_kernel("ep").kind == KernelKind::epanechnikov);
  CHECK(parse_kernel("trunc").kind == KernelKind::truncated);
  CHECK(parse_kernel("bartlett").kind == KernelKind::bartlett);
  CHECK_THROWS_AS(parse_kernel("parzen"), ConfigError);
  for (double u = -1.2; u <= 1.2; u += 0.05)
    for (const auto& k : {ep, ba, tr}) CHECK(kernel_eval(k, u) == oracle::kernel(k, u));
}

TEST_CASE("default bandwidths follow the rate with floor and cap") {
  CHECK(default_bandwidths({20, 20, 20}) == BandwidthTriple{{4, 4, 4}});
  CHECK(default_bandwidths({1, 1, 50}) == BandwidthTriple{{0, 0, 5}});
  CHECK(default_bandwidths({2, 3, 100}) == BandwidthTriple{{1, 2, 7}});
  const BandwidthTriple too_wide{{2, 2, 2}}, negative{{-1, 2, 2}}, ok{{0, 4, 1}};
  const LatticeDims narrow{2, 5, 5}, cube{5, 5, 5}, slim{1, 5, 2};
  CHECK_THROWS_AS(too_wide.validate(narrow), ConfigError);
  CHECK_THROWS_AS(negative.validate(cube), ConfigError);
  CHECK_NOTHROW(ok.validate(slim));
}

TEST_CASE("frequency grid points and mirror symmetry") {
  for (GridConvention conv : {GridConvention::dft, GridConvention::endpoint}) {
    const FrequencyGrid grid(BandwidthTriple{{2, 1, 3}}, conv);
    CHECK(grid.size() == 5u * 3u * 7u);
    const auto c = grid.point(grid.center());
    CHECK(c == std::array<double, 3>{0.0, 0.0, 0.0});
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto p = grid.point(g), q = grid.point(grid.mirror(g));
      for (int d = 0; d < 3; ++d) CHECK(p[d] == -q[d]);
      const auto h = grid.box().offsets(g);
      CHECK(grid.box().flat(h[0], h[1], h[2]) == g);
    }
    CHECK(grid.half().size() == (grid.size() + 1) / 2);
  }
  const FrequencyGrid dft(BandwidthTriple{{2, 2, 2}}, GridConvention::dft);
  CHECK(dft.theta(0, 1) == doctest::Approx(2 * pi / 5).epsilon(1e-15));
  const FrequencyGrid ep(BandwidthTriple{{2, 2, 2}}, GridConvention::endpoint);
  CHECK(ep.theta(2, 2) == doctest::Approx(pi).epsilon(1e-15));
  const FrequencyGrid zero(BandwidthTriple{{0, 0, 1}});
  CHECK(zero.size() == 3u);
  CHECK(parse_grid_convention("paper") == GridConvention::endpoint);
}

TEST_CASE("autocovariance agrees with the pairwise oracle") {
  const LatticeField x = demean(oracle::random_field(3, {4, 3, 6}, 101));
  const auto set = sample_autocovariance(x, BandwidthTriple{{2, 1, 3}});
  for (int h1 = -2; h1 <= 2; ++h1)
    for (int h2 = -1; h2 <= 1; ++h2)
      for (int h3 = -3; h3 <= 3; ++h3) {
        const Eigen::MatrixXd ref = oracle::autocov(x, h1, h2, h3);
        CHECK((set.at({h1, h2, h3}) - ref).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((lag_product(x, {h1, h2, h3}) - ref).cwiseAbs().maxCoeff() <= 1e-13);
      }
}

TEST_CASE("negated lag is the exact transpose") {
  const LatticeField x = demean(oracle::random_field(4, {5, 4, 7}, 102));
  const auto set = sample_autocovariance(x, BandwidthTriple{{3, 2, 4}}, 2);
  for (int h1 = -3; h1 <= 3; ++h1)
    for (int h2 = -2; h2 <= 2; ++h2)
      for (int h3 = -4; h3 <= 4; ++h3) CHECK(set.at({h1, h2, h3}) == set.at({-h1, -h2, -h3}).transpose());
  CHECK(set.at({0, 0, 0}) == set.at({0, 0, 0}).transpose());
}

TEST_CASE("autocovariance preconditions") {
  const LatticeField raw = oracle::random_field(2, {4, 4, 4}, 103);
  CHECK_THROWS_AS(sample_autocovariance(raw, BandwidthTriple{{1, 1, 1}}), ConfigError);
  CHECK_THROWS_AS(sample_autocovariance(demean(raw), BandwidthTriple{{4, 1, 1}}), ConfigError);
  const LatticeField x = demean(raw);
  CHECK(lag_product(x, {4, 0, 0}).isZero(0.0));
}

TEST_CASE("spectral estimate equals the double sum over point pairs") {
  struct Case {
    int n;
    LatticeDims dims;
    BandwidthTriple bw;
    KernelTriple k;
    GridConvention conv;
  };
  const KernelTriple mixed{KernelSpec{KernelKind::bartlett}, KernelSpec{KernelKind::truncated},
                           KernelSpec{KernelKind::epanechnikov}};
  const Case cases[] = {
      {2, {4, 3, 5}, {{2, 1, 2}}, kEp, GridConvention::dft},
      {3, {5, 5, 6}, {{2, 2, 3}}, kBart, GridConvention::endpoint},
      {1, {3, 4, 6}, {{1, 2, 3}}, mixed, GridConvention::dft},
      {2, {1, 4, 6}, {{0, 2, 3}}, kEp, GridConvention::dft},
  };
  unsigned seed = 200;
  for (const auto& c : cases) {
    const LatticeField x = demean(oracle::random_field(c.n, c.dims, ++seed));
    const auto est = estimate_spectral_density(x, c.k, c.bw, c.conv);
    REQUIRE(est.matrices.size() == est.grid.size());
    for (std::size_t g = 0; g < est.grid.size(); ++g) {
      const Eigen::MatrixXcd ref = oracle::spectral_double_sum(x, c.k, c.bw, est.grid.point(g));
      CHECK(oracle::max_abs(est.matrices[g] - ref) <= 1e-10);
    }
  }
}

TEST_CASE("estimates are exactly Hermitian and conjugate-symmetric") {
  const LatticeField x = demean(oracle::random_field(4, {6, 5, 8}, 301));
  const auto est = estimate_spectral_density(x, kEp, BandwidthTriple{{2, 2, 3}});
  for (std::size_t g = 0; g < est.grid.size(); ++g) {
    CHECK(est.matrices[g] == est.matrices[g].adjoint());
    CHECK(est.matrices[est.grid.mirror(g)] == est.matrices[g].conjugate());
  }
  CHECK(est.matrices[est.grid.center()].imag().isZero(0.0));
}

TEST_CASE("grid average recovers the lag-zero autocovariance") {
  const LatticeField x = demean(oracle::random_field(3, {6, 6, 9}, 302));
  for (const auto& k : {kEp, kBart}) {
    const auto est = estimate_spectral_density(x, k, BandwidthTriple{{2, 3, 4}});
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(3, 3);
    for (const auto& m : est.matrices) mean += m;
    mean /= static_cast<double>(est.grid.size());
    CHECK(oracle::max_abs(mean - oracle::autocov(x, 0, 0, 0).cast<std::complex<double>>()) <= 1e-10);
  }
}

TEST_CASE("white noise has a flat spectrum near the identity") {
  const LatticeField x = demean(oracle::random_field(2, {20, 20, 20}, 303));
  const auto est = estimate_spectral_density(x, kEp, default_bandwidths(x.dims()));
  double sum = 0.0, lo = 1e9, hi = -1e9, off = 0.0;
  for (const auto& m : est.matrices) {
    for (int i = 0; i < 2; ++i) {
      sum += m(i, i).real();
      lo = std::min(lo, m(i, i).real());
      hi = std::max(hi, m(i, i).real());
    }
    off = std::max(off, std::abs(m(0, 1)));
  }
  const double mean = sum / (2.0 * static_cast<double>(est.matrices.size()));
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(lo > 0.5);
  CHECK(hi < 1.5);
  CHECK(off < 0.5);
}

TEST_CASE("a temporal cosine peaks at its own frequency") {
  const int T = 90;
  const BandwidthTriple bw{{0, 0, 4}};
  const double omega = 2.0 * pi * 2.0 / 9.0;
  std::vector<double> v(T);
  for (int t = 0; t < T; ++t) v[t] = std::cos(omega * t);
  const LatticeField x = demean(LatticeField(1, {1, 1, T}, v));
  const auto est = estimate_spectral_density(x, kEp, bw);
  const auto& box = est.grid.box();
  int best = 0;
  double best_val = -1.0;
  for (int h = 0; h <= 4; ++h) {
    const double val = est.matrices[box.flat(0, 0, h)](0, 0).real();
    if (val > best_val) best_val = val, best = h;
  }
  CHECK(best == 2);
  CHECK(est.matrices[box.flat(0, 0, -2)](0, 0).real() == best_val);
}

TEST_CASE("bartlett estimates are positive semidefinite") {
  const LatticeField x = demean(oracle::random_field(5, {6, 6, 10}, 304));
  const auto est = estimate_spectral_density(x, kBart, BandwidthTriple{{3, 3, 5}});
  for (const auto& m : est.matrices) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("scaling the data by c scales the estimate by c squared") {
  const LatticeField x = demean(oracle::random_field(3, {5, 4, 8}, 305));
  std::vector<double> scaled(x.values().begin(), x.values().end());
  for (auto& v : scaled) v *= -3.0;
  const LatticeField y = demean(LatticeField(3, x.dims(), scaled));
  const BandwidthTriple bw{{2, 2, 3}};
  const auto a = estimate_spectral_density(x, kEp, bw);
  const auto b = estimate_spectral_density(y, kEp, bw);
  const double tol = 1e-12 * 9.0 * spectral_scale(a);
  for (std::size_t g = 0; g < a.matrices.size(); ++g) CHECK(oracle::max_abs(b.matrices[g] - 9.0 * a.matrices[g]) <= tol);
}

TEST_CASE("results do not depend on the thread count") {
  const LatticeField x = demean(oracle::random_field(6, {6, 5, 9}, 306));
  const BandwidthTriple bw{{2, 2, 3}};
  const auto a = estimate_spectral_density(x, kEp, bw, GridConvention::dft, 1);
  const auto b = estimate_spectral_density(x, kEp, bw, GridConvention::dft, 3);
  for (std::size_t g = 0; g < a.matrices.size(); ++g) CHECK(a.matrices[g] == b.matrices[g]);
}

TEST_CASE("factored spectrum equals the dense estimate") {
  const LatticeField x = demean(oracle::random_field(20, {2, 2, 3}, 307));
  for (GridConvention conv : {GridConvention::dft, GridConvention::endpoint}) {
    const BandwidthTriple bw{{1, 1, 2}};
    const auto dense = estimate_spectral_density(x, kEp, bw, conv);
    const auto fac = estimate_factored_spectrum(x, kEp, bw, conv);
    CHECK(fac.n() == 20);
    CHECK(fac.rank() <= 12);
    const Eigen::MatrixXd qtq = fac.basis.transpose() * fac.basis;
    CHECK((qtq - Eigen::MatrixXd::Identity(fac.rank(), fac.rank())).cwiseAbs().maxCoeff() <= 1e-12);
    const double tol = 1e-10 * spectral_scale(dense);
    for (std::size_t g = 0; g < dense.matrices.size(); ++g) {
      CHECK(oracle::max_abs(fac.dense(g) - dense.matrices[g]) <= tol);
      CHECK(oracle::max_abs(fac.cores[g] - fac.cores[g].adjoint()) <= 1e-14 * spectral_scale(dense));
    }
  }
}

TEST_CASE("principal submatrix matches the estimate of the selected series") {
  const LatticeField x = demean(oracle::random_field(5, {5, 5, 6}, 308));
  const BandwidthTriple bw{{2, 2, 2}};
  const auto full = estimate_spectral_density(x, kEp, bw);
  const std::vector<int> order{3, 0, 4, 1, 2};
  const auto sub = principal_submatrix(full, std::span<const int>(order).first(3));
  const auto direct = estimate_spectral_density(select_series(x, std::span<const int>(order).first(3)), kEp, bw);
  REQUIRE(sub.n() == 3);
  for (std::size_t g = 0; g < full.matrices.size(); ++g)
    CHECK(oracle::max_abs(sub.matrices[g] - direct.matrices[g]) <= 1e-12 * spectral_scale(full));
}

TEST_CASE("json export carries grid metadata and values") {
  const LatticeField x = demean(oracle::random_field(2, {3, 3, 4}, 309));
  const auto est = estimate_spectral_density(x, kEp, BandwidthTriple{{1, 1, 1}});
  const auto doc = nlohmann::json::parse(spectral_to_json(est));
  CHECK(doc["n"] == 2);
  CHECK(doc["G"] == 27);
  CHECK(doc["grid_convention"] == "dft");
  REQUIRE(doc["frequencies"].size() == 27);
  const auto& f = doc["frequencies"][5];
  CHECK(f["re"][1].get<double>() == est.matrices[5](0, 1).real());
  CHECK(f["im"][2].get<double>() == est.matrices[5](1, 0).imag());
}
