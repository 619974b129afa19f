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

#ifndef GSTFM_GSTFM_H
#define GSTFM_GSTFM_H

/* C interface of the gstfm library. All objects are opaque handles owned by
 * the caller and released with the matching *_free function. Every call
 * returns a gstfm_status; on failure gstfm_last_error() describes the error
 * for the calling thread. Strings returned through char** are released with
 * gstfm_string_free. Lattice indices in this interface are one-based. */

#include <stddef.h>
#include <stdint.h>

#if defined(GSTFM_BUILDING_LIBRARY)
#define GSTFM_API __attribute__((visibility("default")))
#else
#define GSTFM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gstfm_status {
  GSTFM_OK = 0,
  GSTFM_ERR_CONFIG = 2,
  GSTFM_ERR_DATA = 3,
  GSTFM_ERR_NUMERIC = 4,
  GSTFM_ERR_INTERNAL = 5
} gstfm_status;

typedef struct gstfm_field gstfm_field;
typedef struct gstfm_settings gstfm_settings;
typedef struct gstfm_estimate gstfm_estimate;
typedef struct gstfm_scan gstfm_scan;
typedef struct gstfm_mc_result gstfm_mc_result;

GSTFM_API const char* gstfm_version(void);
GSTFM_API const char* gstfm_last_error(void);
GSTFM_API void gstfm_string_free(char* s);

/* Fields. values are n*s1*s2*t doubles with t fastest, then s2, s1, series.
 * format is "csv" or "stf"; NULL picks by file extension. */
GSTFM_API gstfm_status gstfm_field_create(int n, int s1, int s2, int t, const double* values, gstfm_field** out);
GSTFM_API gstfm_status gstfm_field_load(const char* path, const char* format, gstfm_field** out);
GSTFM_API gstfm_status gstfm_field_store(const gstfm_field* field, const char* path, const char* format);
GSTFM_API gstfm_status gstfm_field_shape(const gstfm_field* field, int* n, int* s1, int* s2, int* t);
GSTFM_API gstfm_status gstfm_field_values(const gstfm_field* field, double* out, size_t count);
GSTFM_API void gstfm_field_free(gstfm_field* field);

/* Pipeline settings; defaults resolve from the lattice when unset. */
GSTFM_API gstfm_status gstfm_settings_create(gstfm_settings** out);
GSTFM_API gstfm_status gstfm_settings_apply_json(gstfm_settings* s, const char* json);
GSTFM_API gstfm_status gstfm_settings_set_kernel(gstfm_settings* s, const char* names);
GSTFM_API gstfm_status gstfm_settings_set_bandwidths(gstfm_settings* s, int b1, int b2, int b3);
GSTFM_API gstfm_status gstfm_settings_set_truncation(gstfm_settings* s, int m1, int m2, int m3);
GSTFM_API gstfm_status gstfm_settings_set_grid(gstfm_settings* s, const char* convention);
GSTFM_API gstfm_status gstfm_settings_set_threads(gstfm_settings* s, int threads);
GSTFM_API gstfm_status gstfm_settings_set_qmax(gstfm_settings* s, int q_max);
GSTFM_API gstfm_status gstfm_settings_set_cgrid(gstfm_settings* s, double start, double step, double stop);
GSTFM_API gstfm_status gstfm_settings_set_subsamples(gstfm_settings* s, int step, int count);
GSTFM_API gstfm_status gstfm_settings_set_c_manual(gstfm_settings* s, double c);
GSTFM_API gstfm_status gstfm_settings_echo(const gstfm_settings* s, int s1, int s2, int t, char** json);
GSTFM_API void gstfm_settings_free(gstfm_settings* s);

/* Simulation from a JSON config (model, n, dims, q, idio, seed, ra). */
GSTFM_API gstfm_status gstfm_simulate(const char* config_json, uint64_t replication, int threads, gstfm_field** x,
                                      gstfm_field** chi);

/* Common component of the lattice model, or of the stacked GDFM baseline. */
GSTFM_API gstfm_status gstfm_estimate_common(const gstfm_field* x, int q, const gstfm_settings* s,
                                             gstfm_estimate** out);
GSTFM_API gstfm_status gstfm_gdfm_baseline(const gstfm_field* x, int q, const gstfm_settings* s,
                                           gstfm_estimate** out);
GSTFM_API gstfm_status gstfm_estimate_chi(const gstfm_estimate* est, gstfm_field** out);
GSTFM_API gstfm_status gstfm_estimate_interior(const gstfm_estimate* est, int lo[3], int hi[3]);
GSTFM_API gstfm_status gstfm_estimate_settings_json(const gstfm_estimate* est, char** json);
GSTFM_API gstfm_status gstfm_error_metrics(const gstfm_estimate* est, const gstfm_field* chi_true, const char* region,
                                           double* e1, double* e2);
GSTFM_API void gstfm_estimate_free(gstfm_estimate* est);

/* Number of factors. ic_values, when not NULL, receives q_max+1 values. */
GSTFM_API gstfm_status gstfm_select_q_fixed_c(const gstfm_field* x, const gstfm_settings* s, double c, int* qhat,
                                              double* ic_values);
GSTFM_API gstfm_status gstfm_select_q(const gstfm_field* x, const gstfm_settings* s, uint64_t seed, gstfm_scan** out);
GSTFM_API gstfm_status gstfm_scan_selection(const gstfm_scan* scan, int* selected_q, double* selected_c, int* manual);
GSTFM_API gstfm_status gstfm_scan_size(const gstfm_scan* scan, size_t* count);
GSTFM_API gstfm_status gstfm_scan_curve(const gstfm_scan* scan, double* c, double* S, int* q_by_c, size_t count);
GSTFM_API gstfm_status gstfm_scan_csv(const gstfm_scan* scan, char** csv);
GSTFM_API gstfm_status gstfm_scan_summary_json(const gstfm_scan* scan, char** json);
GSTFM_API void gstfm_scan_free(gstfm_scan* scan);

/* Frequency-averaged top_k eigenvalues per m (row-major count x top_k);
 * stacked != 0 analyses the stacked location series. */
GSTFM_API gstfm_status gstfm_eigengap(const gstfm_field* x, const int* m_values, size_t count, int top_k, int stacked,
                                      const gstfm_settings* s, double* out);
GSTFM_API gstfm_status gstfm_eigengap_csv(const gstfm_field* x, const int* m_values, size_t count, int top_k,
                                          int stacked, const gstfm_settings* s, char** csv);

/* Spectral density estimate as JSON. */
GSTFM_API gstfm_status gstfm_spectral_json(const gstfm_field* x, const gstfm_settings* s, char** json);

/* Monte Carlo study from a JSON config (simulation and pipeline keys,
 * "study": estimation | comparison | selection). */
GSTFM_API gstfm_status gstfm_mc_study(const char* config_json, int threads, gstfm_mc_result** out);
GSTFM_API gstfm_status gstfm_mc_csv(const gstfm_mc_result* r, char** csv);
GSTFM_API gstfm_status gstfm_mc_summary_json(const gstfm_mc_result* r, char** json);
GSTFM_API void gstfm_mc_free(gstfm_mc_result* r);

#ifdef __cplusplus
}
#endif

#endif
