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

#include "gstfm/gstfm.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "gstfm/core/field_io.hpp"
#include "gstfm/dynpca/eigensystem.hpp"
#include "gstfm/pipeline.hpp"
#include "gstfm/qselect/criterion.hpp"
#include "gstfm/simlab/metrics.hpp"
#include "gstfm/simlab/monte_carlo.hpp"
#include "gstfm/spectral/spectral_density.hpp"
#include "gstfm/util/error.hpp"

struct gstfm_field {
  gstfm::LatticeField field;
};
struct gstfm_settings {
  gstfm::PipelineSettings s;
};
struct gstfm_estimate {
  gstfm::CommonComponentEstimate est;
};
struct gstfm_scan {
  gstfm::StabilityScan scan;
};
struct gstfm_mc_result {
  gstfm::MCResult result;
};

namespace {

thread_local std::string last_error;

template <class F>
gstfm_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return GSTFM_OK;
  } catch (const gstfm::Error& e) {
    last_error = e.what();
    return static_cast<gstfm_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GSTFM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GSTFM_ERR_INTERNAL;
  }
}

template <class T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) throw gstfm::ConfigError(std::string(what) + " is null");
  return *p;
}

template <class T>
T& need_mut(T* p, const char* what) {
  if (p == nullptr) throw gstfm::ConfigError(std::string(what) + " is null");
  return *p;
}

void need_out(const void* p, const char* what) {
  if (p == nullptr) throw gstfm::ConfigError(std::string("output ") + what + " is null");
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gstfm::PipelineSettings settings_or_default(const gstfm_settings* s) {
  return s == nullptr ? gstfm::PipelineSettings{} : s->s;
}

nlohmann::json parse_json(const char* text) {
  if (text == nullptr) throw gstfm::ConfigError("config JSON is null");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw gstfm::ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

gstfm::FieldFormat resolve_format(const char* path, const char* format) {
  return format == nullptr ? gstfm::format_from_path(path) : gstfm::parse_field_format(format);
}

} // namespace

extern "C" {

const char* gstfm_version(void) { return "0.1.0"; }
const char* gstfm_last_error(void) { return last_error.c_str(); }
void gstfm_string_free(char* s) { delete[] s; }

gstfm_status gstfm_field_create(int n, int s1, int s2, int t, const double* values, gstfm_field** out) {
  return guard([&] {
    need_out(out, "field");
    if (values == nullptr) throw gstfm::ConfigError("values is null");
    const gstfm::LatticeDims dims{s1, s2, t};
    if (n <= 0 || s1 <= 0 || s2 <= 0 || t <= 0) throw gstfm::DataError("field shape must be positive");
    std::vector<double> v(values, values + static_cast<std::size_t>(n) * dims.points());
    *out = new gstfm_field{gstfm::LatticeField(n, dims, std::move(v))};
  });
}

gstfm_status gstfm_field_load(const char* path, const char* format, gstfm_field** out) {
  return guard([&] {
    need_out(out, "field");
    if (path == nullptr) throw gstfm::ConfigError("path is null");
    *out = new gstfm_field{gstfm::load_field(std::filesystem::path(path), resolve_format(path, format))};
  });
}

gstfm_status gstfm_field_store(const gstfm_field* field, const char* path, const char* format) {
  return guard([&] {
    const auto& f = need(field, "field");
    if (path == nullptr) throw gstfm::ConfigError("path is null");
    gstfm::store_field(std::filesystem::path(path), f.field, resolve_format(path, format));
  });
}

gstfm_status gstfm_field_shape(const gstfm_field* field, int* n, int* s1, int* s2, int* t) {
  return guard([&] {
    const auto& f = need(field, "field").field;
    if (n) *n = f.n();
    if (s1) *s1 = f.dims().s1;
    if (s2) *s2 = f.dims().s2;
    if (t) *t = f.dims().t;
  });
}

gstfm_status gstfm_field_values(const gstfm_field* field, double* out, size_t count) {
  return guard([&] {
    const auto& f = need(field, "field").field;
    need_out(out, "values");
    if (count != f.size())
      throw gstfm::ConfigError("buffer holds " + std::to_string(count) + " values, field has " +
                               std::to_string(f.size()));
    std::copy(f.values().begin(), f.values().end(), out);
  });
}

void gstfm_field_free(gstfm_field* field) { delete field; }

gstfm_status gstfm_settings_create(gstfm_settings** out) {
  return guard([&] {
    need_out(out, "settings");
    *out = new gstfm_settings{};
  });
}

gstfm_status gstfm_settings_apply_json(gstfm_settings* s, const char* json) {
  return guard([&] { gstfm::apply_settings_json(need_mut(s, "settings").s, parse_json(json)); });
}

gstfm_status gstfm_settings_set_kernel(gstfm_settings* s, const char* names) {
  return guard([&] {
    if (names == nullptr) throw gstfm::ConfigError("kernel name is null");
    need_mut(s, "settings").s.kernels = gstfm::parse_kernels(names);
  });
}

gstfm_status gstfm_settings_set_bandwidths(gstfm_settings* s, int b1, int b2, int b3) {
  return guard([&] { need_mut(s, "settings").s.bw = gstfm::BandwidthTriple{{b1, b2, b3}}; });
}

gstfm_status gstfm_settings_set_truncation(gstfm_settings* s, int m1, int m2, int m3) {
  return guard([&] { need_mut(s, "settings").s.trunc = gstfm::TruncationSpec{{m1, m2, m3}}; });
}

gstfm_status gstfm_settings_set_grid(gstfm_settings* s, const char* convention) {
  return guard([&] {
    if (convention == nullptr) throw gstfm::ConfigError("grid convention is null");
    need_mut(s, "settings").s.convention = gstfm::parse_grid_convention(convention);
  });
}

gstfm_status gstfm_settings_set_threads(gstfm_settings* s, int threads) {
  return guard([&] {
    if (threads < 0) throw gstfm::ConfigError("threads must be non-negative");
    need_mut(s, "settings").s.threads = threads;
  });
}

gstfm_status gstfm_settings_set_qmax(gstfm_settings* s, int q_max) {
  return guard([&] {
    if (q_max < 0) throw gstfm::ConfigError("q_max must be non-negative");
    need_mut(s, "settings").s.q_max = q_max;
  });
}

gstfm_status gstfm_settings_set_cgrid(gstfm_settings* s, double start, double step, double stop) {
  return guard([&] { need_mut(s, "settings").s.c_grid = gstfm::make_c_grid(start, step, stop); });
}

gstfm_status gstfm_settings_set_subsamples(gstfm_settings* s, int step, int count) {
  return guard([&] {
    if (step < 1 || count < 0) throw gstfm::ConfigError("subsamples need step >= 1 and count >= 0");
    need_mut(s, "settings").s.subsamples = {step, count};
  });
}

gstfm_status gstfm_settings_set_c_manual(gstfm_settings* s, double c) {
  return guard([&] {
    if (!(c >= 0.0)) throw gstfm::ConfigError("c must be non-negative");
    need_mut(s, "settings").s.stability.c_manual = c;
  });
}

gstfm_status gstfm_settings_echo(const gstfm_settings* s, int s1, int s2, int t, char** json) {
  return guard([&] {
    need_out(json, "json");
    *json = dup(gstfm::settings_json(settings_or_default(s), gstfm::LatticeDims{s1, s2, t}).dump(2));
  });
}

void gstfm_settings_free(gstfm_settings* s) { delete s; }

gstfm_status gstfm_simulate(const char* config_json, uint64_t replication, int threads, gstfm_field** x,
                            gstfm_field** chi) {
  return guard([&] {
    need_out(x, "x");
    gstfm::SimConfig cfg;
    gstfm::apply_sim_json(cfg, parse_json(config_json));
    auto out = gstfm::simulate(cfg, replication, threads);
    *x = new gstfm_field{std::move(out.x)};
    if (chi) *chi = new gstfm_field{std::move(out.chi)};
  });
}

gstfm_status gstfm_estimate_common(const gstfm_field* x, int q, const gstfm_settings* s, gstfm_estimate** out) {
  return guard([&] {
    need_out(out, "estimate");
    *out = new gstfm_estimate{gstfm::run_estimate(need(x, "field").field, q, settings_or_default(s))};
  });
}

gstfm_status gstfm_gdfm_baseline(const gstfm_field* x, int q, const gstfm_settings* s, gstfm_estimate** out) {
  return guard([&] {
    need_out(out, "estimate");
    *out = new gstfm_estimate{gstfm::run_gdfm(need(x, "field").field, q, settings_or_default(s))};
  });
}

gstfm_status gstfm_estimate_chi(const gstfm_estimate* est, gstfm_field** out) {
  return guard([&] {
    need_out(out, "field");
    *out = new gstfm_field{need(est, "estimate").est.chi_hat};
  });
}

gstfm_status gstfm_estimate_interior(const gstfm_estimate* est, int lo[3], int hi[3]) {
  return guard([&] {
    const auto& e = need(est, "estimate").est;
    need_out(lo, "lo");
    need_out(hi, "hi");
    for (int d = 0; d < 3; ++d) {
      lo[d] = e.interior_lo[d] + 1;
      hi[d] = e.interior_hi[d] + 1;
    }
  });
}

gstfm_status gstfm_estimate_settings_json(const gstfm_estimate* est, char** json) {
  return guard([&] {
    need_out(json, "json");
    *json = dup(gstfm::common_settings_json(need(est, "estimate").est).dump(2));
  });
}

gstfm_status gstfm_error_metrics(const gstfm_estimate* est, const gstfm_field* chi_true, const char* region,
                                 double* e1, double* e2) {
  return guard([&] {
    const auto m = gstfm::error_metrics(need(est, "estimate").est, need(chi_true, "chi_true").field,
                                        gstfm::parse_region(region ? region : "all"), e2 != nullptr);
    if (e1) *e1 = m.e1;
    if (e2) *e2 = m.e2;
  });
}

void gstfm_estimate_free(gstfm_estimate* est) { delete est; }

gstfm_status gstfm_select_q_fixed_c(const gstfm_field* x, const gstfm_settings* s, double c, int* qhat,
                                    double* ic_values) {
  return guard([&] {
    need_out(qhat, "qhat");
    const auto st = settings_or_default(s);
    const auto& f = need(x, "field").field;
    const auto res = gstfm::select_q_fixed_c(f, st.q_max, c, st.kernels, gstfm::resolve_bandwidths(st, f.dims()),
                                             st.convention, st.threads);
    *qhat = res.qhat;
    if (ic_values) std::copy(res.values.begin(), res.values.end(), ic_values);
  });
}

gstfm_status gstfm_select_q(const gstfm_field* x, const gstfm_settings* s, uint64_t seed, gstfm_scan** out) {
  return guard([&] {
    need_out(out, "scan");
    *out = new gstfm_scan{gstfm::run_selection(need(x, "field").field, settings_or_default(s), seed)};
  });
}

gstfm_status gstfm_scan_selection(const gstfm_scan* scan, int* selected_q, double* selected_c, int* manual) {
  return guard([&] {
    const auto& sc = need(scan, "scan").scan;
    if (selected_q) *selected_q = sc.selected_q;
    if (selected_c) *selected_c = sc.selected_c;
    if (manual) *manual = sc.manual ? 1 : 0;
  });
}

gstfm_status gstfm_scan_size(const gstfm_scan* scan, size_t* count) {
  return guard([&] {
    need_out(count, "count");
    *count = need(scan, "scan").scan.c_grid.size();
  });
}

gstfm_status gstfm_scan_curve(const gstfm_scan* scan, double* c, double* S, int* q_by_c, size_t count) {
  return guard([&] {
    const auto& sc = need(scan, "scan").scan;
    if (count != sc.c_grid.size())
      throw gstfm::ConfigError("buffer holds " + std::to_string(count) + " points, scan has " +
                               std::to_string(sc.c_grid.size()));
    for (std::size_t i = 0; i < count; ++i) {
      if (c) c[i] = sc.c_grid[i];
      if (S) S[i] = sc.S_curve[i];
      if (q_by_c) q_by_c[i] = sc.q_by_c[i];
    }
  });
}

gstfm_status gstfm_scan_csv(const gstfm_scan* scan, char** csv) {
  return guard([&] {
    need_out(csv, "csv");
    *csv = dup(gstfm::scan_to_csv(need(scan, "scan").scan));
  });
}

gstfm_status gstfm_scan_summary_json(const gstfm_scan* scan, char** json) {
  return guard([&] {
    need_out(json, "json");
    *json = dup(gstfm::scan_summary_json(need(scan, "scan").scan));
  });
}

void gstfm_scan_free(gstfm_scan* scan) { delete scan; }

namespace {

Eigen::MatrixXd eigengap_values(const gstfm_field* x, const int* m_values, size_t count, int top_k, int stacked,
                                const gstfm_settings* s) {
  const auto& f = need(x, "field").field;
  if (m_values == nullptr || count == 0) throw gstfm::ConfigError("m_values is empty");
  if (top_k < 1) throw gstfm::ConfigError("top_k must be positive");
  const auto st = settings_or_default(s);
  const std::span<const int> ms(m_values, count);
  if (stacked) {
    const auto bw = gstfm::resolve_bandwidths(st, f.dims());
    return gstfm::stacked_eigengap_curve(f, ms, top_k, st.kernels[2], bw.b[2], st.convention, st.threads);
  }
  return gstfm::eigengap_curve(f, ms, top_k, st.kernels, gstfm::resolve_bandwidths(st, f.dims()), st.convention,
                               st.threads);
}

} // namespace

gstfm_status gstfm_eigengap(const gstfm_field* x, const int* m_values, size_t count, int top_k, int stacked,
                            const gstfm_settings* s, double* out) {
  return guard([&] {
    need_out(out, "values");
    const Eigen::MatrixXd curve = eigengap_values(x, m_values, count, top_k, stacked, s);
    for (Eigen::Index r = 0; r < curve.rows(); ++r)
      for (Eigen::Index j = 0; j < curve.cols(); ++j) out[r * curve.cols() + j] = curve(r, j);
  });
}

gstfm_status gstfm_eigengap_csv(const gstfm_field* x, const int* m_values, size_t count, int top_k, int stacked,
                                const gstfm_settings* s, char** csv) {
  return guard([&] {
    need_out(csv, "csv");
    const Eigen::MatrixXd curve = eigengap_values(x, m_values, count, top_k, stacked, s);
    *csv = dup(gstfm::eigengap_to_csv(std::span<const int>(m_values, count), curve));
  });
}

gstfm_status gstfm_spectral_json(const gstfm_field* x, const gstfm_settings* s, char** json) {
  return guard([&] {
    need_out(json, "json");
    const auto st = settings_or_default(s);
    const auto f = gstfm::ensure_demeaned(need(x, "field").field);
    const auto spec = gstfm::estimate_spectral_density(f, st.kernels, gstfm::resolve_bandwidths(st, f.dims()),
                                                       st.convention, st.threads);
    *json = dup(gstfm::spectral_to_json(spec));
  });
}

gstfm_status gstfm_mc_study(const char* config_json, int threads, gstfm_mc_result** out) {
  return guard([&] {
    need_out(out, "result");
    const auto spec = gstfm::mc_spec_from_json(parse_json(config_json));
    *out = new gstfm_mc_result{gstfm::run_mc_study(spec.sim, spec.settings, spec.kind, threads)};
  });
}

gstfm_status gstfm_mc_csv(const gstfm_mc_result* r, char** csv) {
  return guard([&] {
    need_out(csv, "csv");
    *csv = dup(gstfm::mc_to_csv(need(r, "result").result));
  });
}

gstfm_status gstfm_mc_summary_json(const gstfm_mc_result* r, char** json) {
  return guard([&] {
    need_out(json, "json");
    *json = dup(gstfm::mc_summary_json(need(r, "result").result).dump(2));
  });
}

void gstfm_mc_free(gstfm_mc_result* r) { delete r; }

} // extern "C"
