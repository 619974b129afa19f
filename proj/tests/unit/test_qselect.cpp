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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "gstfm/dynpca/eigensystem.hpp"
#include "gstfm/qselect/criterion.hpp"
#include "gstfm/qselect/stability_scan.hpp"
#include "gstfm/util/error.hpp"
#include "support/oracles.hpp"

using namespace gstfm;

namespace {

const KernelTriple kEp = same_kernel({KernelKind::epanechnikov});

// One common white-noise factor with loading 2 plus unit noise.
LatticeField one_factor_field(int n, LatticeDims dims, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> f(dims.points());
  for (auto& v : f) v = nd(gen);
  std::vector<double> x(static_cast<std::size_t>(n) * dims.points());
  for (int ell = 0; ell < n; ++ell)
    for (std::size_t p = 0; p < dims.points(); ++p) x[ell * dims.points() + p] = 2.0 * f[p] + nd(gen);
  return LatticeField(n, dims, std::move(x));
}

StabilityScan table_scan(const std::vector<std::vector<int>>& rows, double step) {
  StabilityScan s;
  for (std::size_t l = 0; l < rows.size(); ++l) s.c_grid.push_back(static_cast<double>(l) * step);
  s.qhat_table = rows;
  return s;
}

} // namespace

TEST_CASE("penalty regression values") {
  const PenaltySpec a{100, {25, 25, 25}, {{4, 4, 4}}, {2.0, 2.0, 2.0}, 1.0};
  CHECK(penalty_value(a) == doctest::Approx(0.6509959967059817).epsilon(1e-12));
  const PenaltySpec b{30, {10, 12, 40}, {{2, 3, 5}}, {1.0, 2.0, 2.0}, 1.0};
  CHECK(penalty_value(b) == doctest::Approx(0.5415805704228774).epsilon(1e-12));
  const PenaltySpec via = make_penalty(100, {25, 25, 25}, BandwidthTriple{{4, 4, 4}}, kEp, 1.0);
  CHECK(penalty_value(via) == penalty_value(a));
}

TEST_CASE("penalty is linear in c and validates its inputs") {
  PenaltySpec s{50, {20, 20, 20}, {{3, 3, 3}}, {2.0, 2.0, 2.0}, 1.0};
  const double p1 = penalty_value(s);
  s.c = 2.0;
  CHECK(penalty_value(s) == doctest::Approx(2.0 * p1).epsilon(1e-15));
  s.c = 0.0;
  CHECK(penalty_value(s) == 0.0);
  s.c = -1.0;
  CHECK_THROWS_AS(penalty_value(s), ConfigError);
  s.c = 1.0;
  s.bw = BandwidthTriple{{1, 3, 3}};
  CHECK_THROWS_AS(penalty_value(s), ConfigError);
}

TEST_CASE("the smallest argument of the logarithm drives the penalty") {
  // n = 2 is the minimum: log 2 times the sum.
  const PenaltySpec s{2, {40, 40, 40}, {{4, 4, 4}}, {2.0, 2.0, 2.0}, 1.0};
  const double P = 64000.0;
  const double V = std::sqrt(P) / (std::sqrt(64.0) * std::pow(std::log(4.0), 3));
  const double want = (0.5 + 3.0 / 16.0 + 1.0 / V) * std::log(2.0);
  CHECK(penalty_value(s) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("identity spectrum information criterion has a closed form") {
  const int n = 8;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double p = 0.3;
  const auto ic = information_criteria(ones, 5, p);
  REQUIRE(ic.values.size() == 6);
  for (int k = 0; k <= 5; ++k) {
    CHECK(ic.eigen_tail_sums[k] == doctest::Approx((n - k) / static_cast<double>(n)).epsilon(1e-15));
    CHECK(ic.values[k] == doctest::Approx(std::log((n - k) / static_cast<double>(n)) + k * p).epsilon(1e-14));
  }
  CHECK(ic.qhat == 0);
  // Without a penalty every extra factor lowers the criterion.
  CHECK(information_criteria(ones, 5, 0.0).qhat == 5);
}

TEST_CASE("criterion picks the first minimiser and rejects degenerate tails") {
  Eigen::VectorXd ev(4);
  ev << 4.0, 2.0, 1.0, 1.0;
  // IC(0) = log 2, IC(1) = log 1 + p; equal at p = log 2.
  const auto tie = information_criteria(ev, 2, std::log(2.0));
  CHECK(tie.qhat == 0);
  Eigen::VectorXd zero_tail(3);
  zero_tail << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(information_criteria(zero_tail, 1, 0.1), NumericError);
  CHECK_THROWS_AS(information_criteria(ev, 5, 0.1), ConfigError);
}

TEST_CASE("clamped averages drop negative eigenvalues before averaging") {
  std::vector<Eigen::VectorXd> ev(2, Eigen::VectorXd(3));
  ev[0] << 3.0, 1.0, -1.0;
  ev[1] << 1.0, -2.0, -3.0;
  const Eigen::VectorXd c = clamped_average_eigenvalues(ev);
  CHECK(c(0) == 2.0);
  CHECK(c(1) == 0.5);
  CHECK(c(2) == 0.0);
}

TEST_CASE("single-k criterion matches the full table") {
  const LatticeField x = demean(oracle::random_field(6, {5, 5, 5}, 501));
  const BandwidthTriple bw{{2, 2, 2}};
  const auto sys = eigendecompose_all(estimate_spectral_density(x, kEp, bw), 0);
  const PenaltySpec pen = make_penalty(6, x.dims(), bw, kEp, 0.7);
  const auto table = information_criteria(clamped_average_eigenvalues(sys.eigenvalues), 4, penalty_value(pen));
  for (int k = 0; k <= 4; ++k) CHECK(information_criterion(sys, k, pen) == doctest::Approx(table.values[k]));
}

TEST_CASE("independent noise selects no factor") {
  const LatticeField x = oracle::random_field(60, {15, 15, 15}, 502);
  const auto bw = default_bandwidths(x.dims());
  CHECK(select_q_fixed_c(x, 5, 1.0, kEp, bw).qhat == 0);
}

TEST_CASE("one strong factor is found and a huge penalty removes it") {
  const LatticeField x = one_factor_field(30, {8, 8, 8}, 503);
  const auto bw = default_bandwidths(x.dims());
  CHECK(select_q_fixed_c(x, 4, 1.0, kEp, bw).qhat == 1);
  CHECK(select_q_fixed_c(x, 4, 1e3, kEp, bw).qhat == 0);
  CHECK(select_q_fixed_c(x, 4, 0.0, kEp, bw).qhat == 4);
  CHECK_THROWS_AS(select_q_fixed_c(x, 30, 1.0, kEp, bw), ConfigError);
}

TEST_CASE("c grid construction and parsing") {
  const auto g = make_c_grid(0.0, 0.0005, 3.0);
  CHECK(g.size() == 6001);
  CHECK(g.back() == doctest::Approx(3.0));
  const auto p = parse_c_grid("0.5:0.25:1.5");
  CHECK(p == std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5});
  CHECK_THROWS_AS(parse_c_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_c_grid("0:x:1"), ConfigError);
  CHECK_THROWS_AS(parse_c_grid("0:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_c_grid("2:1:1"), ConfigError);
}

TEST_CASE("stability intervals on a synthetic step table") {
  std::vector<std::vector<int>> rows;
  auto put = [&](int count, std::vector<int> row) {
    for (int i = 0; i < count; ++i) rows.push_back(row);
  };
  put(20, {5, 4, 5});   // c = 0.00 .. 0.19, unstable
  put(31, {3, 3, 3});   // 0.20 .. 0.50
  put(2, {3, 2, 2});    // 0.51 .. 0.52
  put(2, {2, 2, 2});    // 0.53 .. 0.54, too short
  put(1, {2, 1, 1});    // 0.55
  put(36, {1, 1, 1});   // 0.56 .. 0.91
  put(9, {0, 0, 0});    // 0.92 .. 1.00
  StabilityScan s = table_scan(rows, 0.01);
  finalize_scan(s, {});
  REQUIRE(s.intervals.size() == 4);
  CHECK(s.intervals[0].first == 20);
  CHECK(s.intervals[0].last == 50);
  CHECK(s.intervals[0].q == 3);
  CHECK(s.intervals[1].q == 2);
  // The q=1 and q=0 runs touch but stay separate intervals.
  CHECK(s.intervals[2].first == 56);
  CHECK(s.intervals[2].last == 91);
  CHECK(s.intervals[3].first == 92);
  REQUIRE(s.selected_interval.has_value());
  CHECK(*s.selected_interval == 2);
  CHECK(s.selected_q == 1);
  CHECK(s.selected_c == doctest::Approx(0.73));
  CHECK(s.q_by_c[0] == 5);

  StabilityScan loose = table_scan(rows, 0.01);
  finalize_scan(loose, StabilityOptions{0.0, std::nullopt});
  CHECK(*loose.selected_interval == 1);
  CHECK(loose.selected_q == 2);
}

TEST_CASE("variance curve matches a direct population variance") {
  std::mt19937_64 gen(504);
  std::uniform_int_distribution<int> u(0, 3);
  std::vector<std::vector<int>> rows(40, std::vector<int>(7));
  for (auto& r : rows)
    for (auto& q : r) q = u(gen);
  rows[10].assign(7, 2);
  rows[11].assign(7, 2);
  rows[30].assign(7, 1);
  StabilityScan s = table_scan(rows, 0.1);
  finalize_scan(s, StabilityOptions{0.0, std::nullopt});
  for (std::size_t l = 0; l < rows.size(); ++l) {
    const double mean = std::accumulate(rows[l].begin(), rows[l].end(), 0.0) / 7.0;
    double var = 0.0;
    for (int q : rows[l]) var += (q - mean) * (q - mean);
    CHECK(std::abs(s.S_curve[l] - var / 7.0) <= 1e-12);
  }
}

TEST_CASE("a scan without a second interval needs a manual c") {
  std::vector<std::vector<int>> rows(10, std::vector<int>{2, 2});
  for (int i = 0; i < 5; ++i) rows.push_back({2, 1});
  StabilityScan s = table_scan(rows, 0.1);
  try {
    finalize_scan(s, {});
    FAIL("expected a NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("widen c_grid") != std::string::npos);
  }
  StabilityScan m = table_scan(rows, 0.1);
  CHECK_NOTHROW(finalize_scan(m, StabilityOptions{0.05, 0.4}));
  CHECK(m.manual);
}

TEST_CASE("seeded permutations are deterministic permutations") {
  const auto a = seeded_permutation(50, 9);
  const auto b = seeded_permutation(50, 9);
  const auto c = seeded_permutation(50, 10);
  CHECK(a == b);
  CHECK(a != c);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("scan table agrees with fixed-c selection on series subsets") {
  const LatticeField x = demean(one_factor_field(16, {6, 6, 6}, 505));
  const BandwidthTriple bw{{2, 2, 2}};
  const auto grid = make_c_grid(0.0, 0.25, 3.0);
  const StabilityScan s = stability_scan(x, 3, grid, SubsampleSpec{3, 3}, kEp, bw, 77, StabilityOptions{0.05, 1.0});
  CHECK(s.n_subsamples == std::vector<int>{16, 13, 10, 7});
  for (std::size_t j = 0; j < s.n_subsamples.size(); ++j) {
    const std::vector<int> order(s.permutation.begin(), s.permutation.begin() + s.n_subsamples[j]);
    const LatticeField sub = select_series(x, order);
    for (std::size_t l = 0; l < grid.size(); ++l)
      CHECK(s.qhat_table[l][j] == select_q_fixed_c(sub, 3, grid[l], kEp, bw).qhat);
  }
  for (std::size_t l = 1; l < grid.size(); ++l) CHECK(s.q_by_c[l] <= s.q_by_c[l - 1]);
  CHECK(s.manual);
  CHECK(s.selected_c == 1.0);
  CHECK(s.selected_q == select_q_fixed_c(x, 3, 1.0, kEp, bw).qhat);
}

TEST_CASE("scan is deterministic across runs and thread counts") {
  const LatticeField x = oracle::random_field(20, {6, 6, 6}, 506);
  const BandwidthTriple bw{{2, 2, 2}};
  const auto grid = make_c_grid(0.0, 0.05, 2.0);
  const StabilityOptions opt{0.05, 0.5};
  const auto a = stability_scan(x, 3, grid, SubsampleSpec{2, 4}, kEp, bw, 5, opt, GridConvention::dft, 1);
  const auto b = stability_scan(x, 3, grid, SubsampleSpec{2, 4}, kEp, bw, 5, opt, GridConvention::dft, 3);
  CHECK(a.qhat_table == b.qhat_table);
  CHECK(a.S_curve == b.S_curve);
  CHECK(scan_to_csv(a) == scan_to_csv(b));
  CHECK(scan_summary_json(a) == scan_summary_json(b));
  CHECK_THROWS_AS(stability_scan(x, 3, grid, SubsampleSpec{5, 4}, kEp, bw, 5, opt), ConfigError);
}

TEST_CASE("scan exports") {
  StabilityScan s = table_scan({{1, 1}, {1, 0}, {0, 0}, {0, 0}}, 0.5);
  s.q_max = 2;
  s.n_subsamples = {10, 5};
  finalize_scan(s, StabilityOptions{0.0, std::nullopt});
  const std::string csv = scan_to_csv(s);
  CHECK(csv.rfind("c,S_c,qhat_full\n0,0,1\n0.5,0.25,1\n", 0) == 0);
  const auto doc = nlohmann::json::parse(scan_summary_json(s));
  CHECK(doc["selected_q"] == 0);
  CHECK(doc["selected_c"].get<double>() == 1.0);
  CHECK(doc["intervals"].size() == 2);
  CHECK(doc["intervals"][1]["selected"] == true);
}
