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
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gstfm/gstfm.h"

namespace {

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { gstfm_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::vector<double> values_of(const gstfm_field* f) {
  int n = 0, s1 = 0, s2 = 0, t = 0;
  REQUIRE(gstfm_field_shape(f, &n, &s1, &s2, &t) == GSTFM_OK);
  std::vector<double> v(static_cast<std::size_t>(n) * s1 * s2 * t);
  REQUIRE(gstfm_field_values(f, v.data(), v.size()) == GSTFM_OK);
  return v;
}

const char* kSim = R"({"model":"b","n":6,"dims":[6,6,12],"q":2,"seed":3})";

} // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::string(gstfm_version()) == "0.1.0");
  gstfm_field* f = nullptr;
  CHECK(gstfm_field_create(1, 1, 1, 1, nullptr, &f) == GSTFM_ERR_CONFIG);
  CHECK(std::string(gstfm_last_error()).find("null") != std::string::npos);
  const double v[2] = {1.0, NAN};
  CHECK(gstfm_field_create(1, 1, 1, 2, v, &f) == GSTFM_ERR_DATA);
  CHECK(std::string(gstfm_last_error()).find("(1,1,1,2)") != std::string::npos);
  CHECK(gstfm_field_create(0, 1, 1, 2, v, &f) == GSTFM_ERR_DATA);
  CHECK(f == nullptr);
  const double ok[2] = {1.0, 2.0};
  REQUIRE(gstfm_field_create(1, 1, 1, 2, ok, &f) == GSTFM_OK);
  CHECK(std::string(gstfm_last_error()).empty());
  gstfm_field_free(f);
  CHECK(gstfm_field_shape(nullptr, nullptr, nullptr, nullptr, nullptr) == GSTFM_ERR_CONFIG);
}

TEST_CASE("last error is kept per thread") {
  gstfm_field* f = nullptr;
  CHECK(gstfm_field_load("/nonexistent/file.stf", nullptr, &f) == GSTFM_ERR_DATA);
  std::string other;
  std::thread th([&] { other = gstfm_last_error(); });
  th.join();
  CHECK(other.empty());
  CHECK(std::string(gstfm_last_error()).find("cannot open") != std::string::npos);
}

TEST_CASE("fields round trip through files in both formats") {
  std::vector<double> v(2 * 3 * 2 * 4);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(1.0 + static_cast<double>(i));
  gstfm_field* f = nullptr;
  REQUIRE(gstfm_field_create(2, 3, 2, 4, v.data(), &f) == GSTFM_OK);
  const auto dir = std::filesystem::temp_directory_path();
  for (const char* ext : {".stf", ".csv"}) {
    const std::string path = (dir / (std::string("gstfm_capi_roundtrip") + ext)).string();
    REQUIRE(gstfm_field_store(f, path.c_str(), nullptr) == GSTFM_OK);
    gstfm_field* g = nullptr;
    REQUIRE(gstfm_field_load(path.c_str(), nullptr, &g) == GSTFM_OK);
    CHECK(values_of(g) == v);
    gstfm_field_free(g);
    std::filesystem::remove(path);
  }
  std::vector<double> small(3);
  CHECK(gstfm_field_values(f, small.data(), small.size()) == GSTFM_ERR_CONFIG);
  CHECK(gstfm_field_store(f, "x.stf", "parquet") == GSTFM_ERR_CONFIG);
  gstfm_field_free(f);
}

TEST_CASE("settings validation and echo") {
  gstfm_settings* s = nullptr;
  REQUIRE(gstfm_settings_create(&s) == GSTFM_OK);
  CHECK(gstfm_settings_set_kernel(s, "parzen") == GSTFM_ERR_CONFIG);
  CHECK(gstfm_settings_set_grid(s, "paper") == GSTFM_OK);
  CHECK(gstfm_settings_set_cgrid(s, 0.0, 0.0, 1.0) == GSTFM_ERR_CONFIG);
  CHECK(gstfm_settings_apply_json(s, "{not json") == GSTFM_ERR_CONFIG);
  CHECK(gstfm_settings_apply_json(s, R"({"qmax":4,"kernel":"bartlett"})") == GSTFM_OK);
  CHECK(gstfm_settings_set_bandwidths(s, 2, 2, 3) == GSTFM_OK);
  OwnedString echo;
  REQUIRE(gstfm_settings_echo(s, 10, 10, 20, &echo.p) == GSTFM_OK);
  const auto doc = nlohmann::json::parse(echo.str());
  CHECK(doc["q_max"] == 4);
  CHECK(doc["bandwidths"] == std::vector<int>{2, 2, 3});
  CHECK(doc["grid_convention"] == "endpoint");
  CHECK(doc["kernels"][0] == "bartlett");
  OwnedString bad;
  CHECK(gstfm_settings_echo(s, 2, 10, 20, &bad.p) == GSTFM_ERR_CONFIG);
  gstfm_settings_free(s);
}

TEST_CASE("simulate, estimate and score through the C interface") {
  gstfm_field *x = nullptr, *chi = nullptr;
  REQUIRE(gstfm_simulate(kSim, 0, 1, &x, &chi) == GSTFM_OK);
  int n, s1, s2, t;
  gstfm_field_shape(x, &n, &s1, &s2, &t);
  CHECK(n == 6);
  CHECK(t == 12);
  gstfm_estimate* est = nullptr;
  REQUIRE(gstfm_estimate_common(x, 2, nullptr, &est) == GSTFM_OK);
  int lo[3], hi[3];
  REQUIRE(gstfm_estimate_interior(est, lo, hi) == GSTFM_OK);
  CHECK(lo[0] == 3);
  CHECK(hi[0] == 4);
  CHECK(lo[2] == 4);
  CHECK(hi[2] == 9);
  double e1 = -1, e2 = -1;
  REQUIRE(gstfm_error_metrics(est, chi, "all", &e1, &e2) == GSTFM_OK);
  CHECK(e1 > 0.0);
  CHECK(e2 > 0.0);
  CHECK(e2 < 1.0);
  CHECK(gstfm_error_metrics(est, chi, "edges", &e1, &e2) == GSTFM_ERR_CONFIG);
  OwnedString js;
  REQUIRE(gstfm_estimate_settings_json(est, &js.p) == GSTFM_OK);
  CHECK(nlohmann::json::parse(js.str())["interior"]["lo"][2] == 4);
  gstfm_estimate_free(est);

  gstfm_estimate* full = nullptr;
  REQUIRE(gstfm_estimate_common(x, 6, nullptr, &full) == GSTFM_OK);
  gstfm_field* chi_full = nullptr;
  REQUIRE(gstfm_estimate_chi(full, &chi_full) == GSTFM_OK);
  const auto xv = values_of(x), cv = values_of(chi_full);
  const std::size_t P = 6 * 6 * 12;
  for (int ell = 0; ell < 6; ++ell) {
    double mean = 0.0;
    for (std::size_t p = 0; p < P; ++p) mean += xv[ell * P + p];
    mean /= static_cast<double>(P);
    for (std::size_t p = 0; p < P; ++p) CHECK(std::abs(cv[ell * P + p] - (xv[ell * P + p] - mean)) <= 1e-12);
  }
  gstfm_field_free(chi_full);
  gstfm_estimate_free(full);
  CHECK(gstfm_estimate_common(x, 7, nullptr, &est) == GSTFM_ERR_CONFIG);

  gstfm_estimate* g = nullptr;
  REQUIRE(gstfm_gdfm_baseline(x, 2, nullptr, &g) == GSTFM_OK);
  REQUIRE(gstfm_estimate_interior(g, lo, hi) == GSTFM_OK);
  CHECK(lo[0] == 1);
  CHECK(hi[0] == 6);
  gstfm_estimate_free(g);
  gstfm_field_free(x);
  gstfm_field_free(chi);
}

TEST_CASE("selection entry points") {
  gstfm_field* x = nullptr;
  REQUIRE(gstfm_simulate(kSim, 1, 1, &x, nullptr) == GSTFM_OK);
  gstfm_settings* s = nullptr;
  gstfm_settings_create(&s);
  gstfm_settings_set_qmax(s, 3);
  int qhat = -1;
  std::vector<double> ic(4);
  REQUIRE(gstfm_select_q_fixed_c(x, s, 1e3, &qhat, ic.data()) == GSTFM_OK);
  CHECK(qhat == 0);
  CHECK(ic[1] > ic[0]);
  gstfm_settings_set_cgrid(s, 0.0, 0.1, 2.0);
  gstfm_settings_set_subsamples(s, 1, 2);
  gstfm_settings_set_c_manual(s, 0.5);
  gstfm_scan* scan = nullptr;
  REQUIRE(gstfm_select_q(x, s, 11, &scan) == GSTFM_OK);
  int q = -1, manual = 0;
  double c = -1.0;
  REQUIRE(gstfm_scan_selection(scan, &q, &c, &manual) == GSTFM_OK);
  CHECK(manual == 1);
  CHECK(c == 0.5);
  std::size_t count = 0;
  REQUIRE(gstfm_scan_size(scan, &count) == GSTFM_OK);
  CHECK(count == 21);
  std::vector<double> cs(count), S(count);
  std::vector<int> qs(count);
  REQUIRE(gstfm_scan_curve(scan, cs.data(), S.data(), qs.data(), count) == GSTFM_OK);
  CHECK(cs[20] == doctest::Approx(2.0));
  for (std::size_t i = 1; i < count; ++i) CHECK(qs[i] <= qs[i - 1]);
  CHECK(gstfm_scan_curve(scan, cs.data(), S.data(), qs.data(), 3) == GSTFM_ERR_CONFIG);
  OwnedString csv, js;
  REQUIRE(gstfm_scan_csv(scan, &csv.p) == GSTFM_OK);
  CHECK(csv.str().rfind("c,S_c,qhat_full\n", 0) == 0);
  REQUIRE(gstfm_scan_summary_json(scan, &js.p) == GSTFM_OK);
  CHECK(nlohmann::json::parse(js.str())["permutation_seed"] == 11);
  gstfm_scan_free(scan);
  gstfm_settings_free(s);
  gstfm_field_free(x);
}

TEST_CASE("eigengap, spectral export and monte carlo") {
  gstfm_field* x = nullptr;
  REQUIRE(gstfm_simulate(kSim, 2, 1, &x, nullptr) == GSTFM_OK);
  const int ms[3] = {2, 4, 6};
  std::vector<double> curve(3 * 2);
  REQUIRE(gstfm_eigengap(x, ms, 3, 2, 0, nullptr, curve.data()) == GSTFM_OK);
  CHECK(curve[4] >= curve[0]);
  OwnedString csv;
  REQUIRE(gstfm_eigengap_csv(x, ms, 3, 2, 1, nullptr, &csv.p) == GSTFM_OK);
  CHECK(csv.str().rfind("m,lambda_1,lambda_2\n", 0) == 0);
  const int bad[1] = {7};
  CHECK(gstfm_eigengap(x, bad, 1, 2, 0, nullptr, curve.data()) == GSTFM_ERR_CONFIG);
  OwnedString spec;
  REQUIRE(gstfm_spectral_json(x, nullptr, &spec.p) == GSTFM_OK);
  CHECK(nlohmann::json::parse(spec.str())["n"] == 6);
  gstfm_field_free(x);

  gstfm_mc_result* r = nullptr;
  REQUIRE(gstfm_mc_study(R"({"model":"b","n":5,"dims":[5,5,8],"q":1,"replications":2,"study":"estimation"})", 1,
                         &r) == GSTFM_OK);
  OwnedString mc, sum;
  REQUIRE(gstfm_mc_csv(r, &mc.p) == GSTFM_OK);
  const std::string rows = mc.str();
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
  REQUIRE(gstfm_mc_summary_json(r, &sum.p) == GSTFM_OK);
  CHECK(nlohmann::json::parse(sum.str())["replications"] == 2);
  gstfm_mc_free(r);
  CHECK(gstfm_mc_study(R"({"study":"nothing"})", 1, &r) == GSTFM_ERR_CONFIG);
}
