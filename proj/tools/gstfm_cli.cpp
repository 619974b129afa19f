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

// Command-line front end over the gstfm C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gstfm/gstfm.h"

namespace {

using json = nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

void check(gstfm_status st) {
  if (st != GSTFM_OK) throw Failure{static_cast<int>(st), gstfm_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{GSTFM_ERR_CONFIG, message}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Field = std::unique_ptr<gstfm_field, Deleter<gstfm_field, gstfm_field_free>>;
using Settings = std::unique_ptr<gstfm_settings, Deleter<gstfm_settings, gstfm_settings_free>>;
using Estimate = std::unique_ptr<gstfm_estimate, Deleter<gstfm_estimate, gstfm_estimate_free>>;
using Scan = std::unique_ptr<gstfm_scan, Deleter<gstfm_scan, gstfm_scan_free>>;
using McResult = std::unique_ptr<gstfm_mc_result, Deleter<gstfm_mc_result, gstfm_mc_free>>;

std::string take(char* s) {
  std::string out(s);
  gstfm_string_free(s);
  return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what, std::size_t want = 0) {
  std::vector<int> out;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      usage(what + ": expected comma-separated integers, got '" + text + "'");
    }
  }
  if (out.empty() || (want != 0 && out.size() != want))
    usage(what + ": expected " + (want ? std::to_string(want) + " " : std::string()) +
          "comma-separated integers, got '" + text + "'");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{GSTFM_ERR_DATA, "cannot open output '" + path + "'"};
  out << text;
  if (!out) throw Failure{GSTFM_ERR_DATA, "write failed for '" + path + "'"};
}

// Options shared by the subcommands; every value is optional and overrides
// the JSON config when given.
struct Common {
  std::string config;
  std::string input, output, format, chi_output, truth;
  std::string kernel, bw, trunc, grid, cgrid, region = "all", model, dims, idio, study, m_values;
  std::optional<int> q, qmax, n, ra, reps, replication, threads, subsample_step, subsample_count, top_k;
  std::optional<double> c_manual, min_interval;
  std::optional<std::uint64_t> seed;
  bool stacked = false;
};

void add_pipeline_options(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config file; flags override its keys");
  app->add_option("--kernel", c.kernel, "ep|bartlett|trunc, or three comma-separated names");
  app->add_option("--bw", c.bw, "bandwidths B1,B2,B3");
  app->add_option("--trunc", c.trunc, "truncation lags M1,M2,M3");
  app->add_option("--grid", c.grid, "frequency grid: dft (default) or paper");
  app->add_option("--threads", c.threads, "worker threads (0 = all); results do not depend on it");
}

json load_config(const Common& c) {
  if (c.config.empty()) return json::object();
  std::ifstream in(c.config);
  if (!in) throw Failure{GSTFM_ERR_CONFIG, "cannot open config '" + c.config + "'"};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure{GSTFM_ERR_CONFIG, std::string("invalid config JSON: ") + e.what()};
  }
}

json merged_config(const Common& c) {
  json doc = load_config(c);
  if (!c.kernel.empty()) doc["kernel"] = c.kernel;
  if (!c.bw.empty()) doc["bw"] = parse_ints(c.bw, "--bw", 3);
  if (!c.trunc.empty()) doc["trunc"] = parse_ints(c.trunc, "--trunc", 3);
  if (!c.grid.empty()) doc["grid"] = c.grid;
  if (!c.cgrid.empty()) doc["cgrid"] = c.cgrid;
  if (c.threads) doc["threads"] = *c.threads;
  if (c.qmax) doc["qmax"] = *c.qmax;
  if (c.subsample_step) doc["subsample_step"] = *c.subsample_step;
  if (c.subsample_count) doc["subsample_count"] = *c.subsample_count;
  if (c.min_interval) doc["min_interval_fraction"] = *c.min_interval;
  if (c.c_manual) doc["c_manual"] = *c.c_manual;
  if (!c.model.empty()) doc["model"] = c.model;
  if (!c.dims.empty()) doc["dims"] = parse_ints(c.dims, "--dims", 3);
  if (!c.idio.empty()) doc["idio"] = c.idio;
  if (!c.study.empty()) doc["study"] = c.study;
  if (c.q) doc["q"] = *c.q;
  if (c.n) doc["n"] = *c.n;
  if (c.ra) doc["ra"] = *c.ra;
  if (c.reps) doc["replications"] = *c.reps;
  if (c.seed) doc["seed"] = *c.seed;
  return doc;
}

// Pipeline keys only; simulation keys are ignored by the settings parser.
Settings make_settings(const json& doc) {
  gstfm_settings* raw = nullptr;
  check(gstfm_settings_create(&raw));
  Settings s(raw);
  check(gstfm_settings_apply_json(s.get(), doc.dump().c_str()));
  return s;
}

const char* format_or_null(const Common& c) { return c.format.empty() ? nullptr : c.format.c_str(); }

Field load_input(const Common& c) {
  if (c.input.empty()) usage("--input is required");
  gstfm_field* raw = nullptr;
  check(gstfm_field_load(c.input.c_str(), nullptr, &raw));
  return Field(raw);
}

void require_output(const Common& c) {
  if (c.output.empty()) usage("--output is required");
}

std::array<int, 4> shape(const gstfm_field* f) {
  std::array<int, 4> s{};
  check(gstfm_field_shape(f, &s[0], &s[1], &s[2], &s[3]));
  return s;
}

json settings_echo(const gstfm_settings* s, const gstfm_field* f) {
  const auto sh = shape(f);
  char* text = nullptr;
  check(gstfm_settings_echo(s, sh[1], sh[2], sh[3], &text));
  return json::parse(take(text));
}

json header(const std::string& subcommand, const Common& c) {
  json doc;
  doc["subcommand"] = subcommand;
  doc["version"] = gstfm_version();
  if (!c.input.empty()) doc["input"] = c.input;
  if (!c.output.empty()) doc["output"] = c.output;
  return doc;
}

int cmd_simulate(const Common& c) {
  require_output(c);
  json cfg = merged_config(c);
  if (!cfg.contains("dims")) usage("--dims is required");
  if (!cfg.contains("n")) usage("--n is required");
  gstfm_field *x = nullptr, *chi = nullptr;
  check(gstfm_simulate(cfg.dump().c_str(), static_cast<std::uint64_t>(c.replication.value_or(0)),
                       cfg.value("threads", 1), &x, c.chi_output.empty() ? nullptr : &chi));
  Field fx(x), fchi(chi);
  check(gstfm_field_store(fx.get(), c.output.c_str(), format_or_null(c)));
  if (fchi) check(gstfm_field_store(fchi.get(), c.chi_output.c_str(), format_or_null(c)));
  json doc = header("simulate", c);
  doc["simulation"] = cfg;
  doc["replication"] = c.replication.value_or(0);
  if (!c.chi_output.empty()) doc["chi_output"] = c.chi_output;
  write_text(c.output + ".json", doc.dump(2) + "\n");
  return 0;
}

json metrics_against(const gstfm_estimate* est, const std::string& truth, const std::string& region) {
  gstfm_field* raw = nullptr;
  check(gstfm_field_load(truth.c_str(), nullptr, &raw));
  Field chi(raw);
  double e1 = 0.0, e2 = 0.0;
  check(gstfm_error_metrics(est, chi.get(), region.c_str(), &e1, &e2));
  return {{"region", region}, {"E1", e1}, {"E2", e2}};
}

int cmd_estimate(const Common& c) {
  Field x = load_input(c);
  require_output(c);
  const json cfg = merged_config(c);
  if (!cfg.contains("q")) usage("--q is required");
  Settings s = make_settings(cfg);
  gstfm_estimate* raw = nullptr;
  check(gstfm_estimate_common(x.get(), cfg.at("q").get<int>(), s.get(), &raw));
  Estimate est(raw);
  gstfm_field* chi = nullptr;
  check(gstfm_estimate_chi(est.get(), &chi));
  Field fchi(chi);
  check(gstfm_field_store(fchi.get(), c.output.c_str(), format_or_null(c)));
  char* text = nullptr;
  check(gstfm_estimate_settings_json(est.get(), &text));
  json doc = header("estimate", c);
  doc["estimate"] = json::parse(take(text));
  doc["settings"] = settings_echo(s.get(), x.get());
  if (!c.truth.empty()) doc["metrics"] = metrics_against(est.get(), c.truth, c.region);
  for (const auto& w : doc["estimate"]["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  write_text(c.output + ".json", doc.dump(2) + "\n");
  if (doc.contains("metrics"))
    std::printf("E1=%.6g E2=%.6g (%s)\n", doc["metrics"]["E1"].get<double>(), doc["metrics"]["E2"].get<double>(),
                c.region.c_str());
  return 0;
}

int cmd_select_q(const Common& c) {
  Field x = load_input(c);
  require_output(c);
  const json cfg = merged_config(c);
  Settings s = make_settings(cfg);
  gstfm_scan* raw = nullptr;
  check(gstfm_select_q(x.get(), s.get(), cfg.value("seed", std::uint64_t{1}), &raw));
  Scan scan(raw);

  std::size_t count = 0;
  check(gstfm_scan_size(scan.get(), &count));
  std::vector<int> q_by_c(count);
  check(gstfm_scan_curve(scan.get(), nullptr, nullptr, q_by_c.data(), count));
  for (std::size_t i = 1; i < count; ++i)
    if (q_by_c[i] > q_by_c[i - 1])
      throw Failure{GSTFM_ERR_NUMERIC, "q-hat increases with c at grid point " + std::to_string(i + 1)};

  char* csv = nullptr;
  check(gstfm_scan_csv(scan.get(), &csv));
  write_text(c.output, take(csv));
  char* text = nullptr;
  check(gstfm_scan_summary_json(scan.get(), &text));
  json doc = header("select-q", c);
  doc["seed"] = cfg.value("seed", std::uint64_t{1});
  doc["scan"] = json::parse(take(text));
  doc["settings"] = settings_echo(s.get(), x.get());
  write_text(c.output + ".json", doc.dump(2) + "\n");
  std::printf("selected q=%d at c=%.6g%s\n", doc["scan"]["selected_q"].get<int>(),
              doc["scan"]["selected_c"].get<double>(), doc["scan"]["manual"].get<bool>() ? " (manual)" : "");
  return 0;
}

int cmd_eigengap(const Common& c) {
  Field x = load_input(c);
  require_output(c);
  const json cfg = merged_config(c);
  Settings s = make_settings(cfg);
  const auto sh = shape(x.get());
  const std::vector<int> ms = c.m_values.empty() ? std::vector<int>{sh[0]} : parse_ints(c.m_values, "--m");
  const int top_k = c.top_k.value_or(10);
  char* csv = nullptr;
  check(gstfm_eigengap_csv(x.get(), ms.data(), ms.size(), top_k, 0, s.get(), &csv));
  write_text(c.output, take(csv));
  json doc = header("eigengap", c);
  doc["m"] = ms;
  doc["top_k"] = top_k;
  doc["settings"] = settings_echo(s.get(), x.get());
  if (c.stacked) {
    if (c.chi_output.empty()) usage("--stacked needs --stacked-output");
    char* stacked = nullptr;
    check(gstfm_eigengap_csv(x.get(), ms.data(), ms.size(), top_k, 1, s.get(), &stacked));
    write_text(c.chi_output, take(stacked));
    doc["stacked_output"] = c.chi_output;
  }
  write_text(c.output + ".json", doc.dump(2) + "\n");
  return 0;
}

int cmd_mc_study(const Common& c) {
  require_output(c);
  const json cfg = merged_config(c);
  gstfm_mc_result* raw = nullptr;
  check(gstfm_mc_study(cfg.dump().c_str(), cfg.value("threads", 1), &raw));
  McResult res(raw);
  char* csv = nullptr;
  check(gstfm_mc_csv(res.get(), &csv));
  write_text(c.output, take(csv));
  char* text = nullptr;
  check(gstfm_mc_summary_json(res.get(), &text));
  json doc = header("mc-study", c);
  doc["config"] = cfg;
  doc["summary"] = json::parse(take(text));
  write_text(c.output + ".json", doc.dump(2) + "\n");
  std::cout << doc["summary"].dump(2) << "\n";
  return 0;
}

int cmd_compare_gdfm(const Common& c) {
  Field x = load_input(c);
  require_output(c);
  const json cfg = merged_config(c);
  if (!cfg.contains("q")) usage("--q is required");
  const int q = cfg.at("q").get<int>();
  Settings s = make_settings(cfg);
  gstfm_estimate *lattice_raw = nullptr, *gdfm_raw = nullptr;
  check(gstfm_estimate_common(x.get(), q, s.get(), &lattice_raw));
  Estimate lattice(lattice_raw);
  check(gstfm_gdfm_baseline(x.get(), q, s.get(), &gdfm_raw));
  Estimate gdfm(gdfm_raw);
  gstfm_field* chi = nullptr;
  check(gstfm_estimate_chi(gdfm.get(), &chi));
  Field fchi(chi);
  check(gstfm_field_store(fchi.get(), c.output.c_str(), format_or_null(c)));
  json doc = header("compare-gdfm", c);
  char* text = nullptr;
  check(gstfm_estimate_settings_json(gdfm.get(), &text));
  doc["gdfm"] = json::parse(take(text));
  check(gstfm_estimate_settings_json(lattice.get(), &text));
  doc["gstfm"] = json::parse(take(text));
  doc["settings"] = settings_echo(s.get(), x.get());
  if (!c.truth.empty()) {
    doc["gdfm"]["metrics"] = metrics_against(gdfm.get(), c.truth, c.region);
    doc["gstfm"]["metrics"] = metrics_against(lattice.get(), c.truth, c.region);
    std::printf("E1 gstfm=%.6g gdfm=%.6g (%s)\n", doc["gstfm"]["metrics"]["E1"].get<double>(),
                doc["gdfm"]["metrics"]["E1"].get<double>(), c.region.c_str());
  }
  write_text(c.output + ".json", doc.dump(2) + "\n");
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal factor model estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gstfm_version()));
  Common c;

  auto* sim = app.add_subcommand("simulate", "simulate model (a) or (b) data");
  add_pipeline_options(sim, c);
  sim->add_option("--model", c.model, "a or b");
  sim->add_option("--n", c.n, "number of series");
  sim->add_option("--dims", c.dims, "S1,S2,T");
  sim->add_option("--q", c.q, "number of factors");
  sim->add_option("--idio", c.idio, "iid or correlated");
  sim->add_option("--ra", c.ra, "model (a) filter radius");
  sim->add_option("--seed", c.seed, "random seed");
  sim->add_option("--replication", c.replication, "replication index of the seed stream");
  sim->add_option("--output", c.output, "observed field");
  sim->add_option("--chi-output", c.chi_output, "true common component");
  sim->add_option("--format", c.format, "csv or stf (default: by extension)");

  auto* est = app.add_subcommand("estimate", "estimate the common component");
  add_pipeline_options(est, c);
  est->add_option("--input", c.input, "input field (.csv or .stf)");
  est->add_option("--output", c.output, "estimated common component");
  est->add_option("--format", c.format, "csv or stf (default: by extension)");
  est->add_option("--q", c.q, "number of factors");
  est->add_option("--truth", c.truth, "true common component for E1/E2");
  est->add_option("--region", c.region, "all or interior");

  auto* sel = app.add_subcommand("select-q", "select the number of factors");
  add_pipeline_options(sel, c);
  sel->add_option("--input", c.input, "input field");
  sel->add_option("--output", c.output, "scan CSV (summary at <output>.json)");
  sel->add_option("--qmax", c.qmax, "largest candidate q");
  sel->add_option("--cgrid", c.cgrid, "start:step:stop");
  sel->add_option("--seed", c.seed, "permutation seed");
  sel->add_option("--subsample-step", c.subsample_step, "n_j = n - step*j");
  sel->add_option("--subsample-count", c.subsample_count, "number of subsamples j = 1..count");
  sel->add_option("--min-interval", c.min_interval, "shortest accepted interval (fraction of the c range)");
  sel->add_option("--c-manual", c.c_manual, "use this c instead of interval detection");

  auto* gap = app.add_subcommand("eigengap", "frequency-averaged eigenvalues versus m");
  add_pipeline_options(gap, c);
  gap->add_option("--input", c.input, "input field");
  gap->add_option("--output", c.output, "CSV m,lambda_1..lambda_k");
  gap->add_option("--m", c.m_values, "comma-separated cross-section sizes (default n)");
  gap->add_option("--top-k", c.top_k, "eigenvalues per row (default 10)");
  gap->add_flag("--stacked", c.stacked, "also analyse the stacked location series");
  gap->add_option("--stacked-output", c.chi_output, "CSV for the stacked analysis");

  auto* mc = app.add_subcommand("mc-study", "Monte Carlo study");
  add_pipeline_options(mc, c);
  mc->add_option("--study", c.study, "estimation, comparison or selection");
  mc->add_option("--model", c.model, "a or b");
  mc->add_option("--n", c.n, "number of series");
  mc->add_option("--dims", c.dims, "S1,S2,T");
  mc->add_option("--q", c.q, "number of factors");
  mc->add_option("--idio", c.idio, "iid or correlated");
  mc->add_option("--ra", c.ra, "model (a) filter radius");
  mc->add_option("--reps", c.reps, "replications");
  mc->add_option("--seed", c.seed, "base seed");
  mc->add_option("--qmax", c.qmax, "largest candidate q (selection)");
  mc->add_option("--cgrid", c.cgrid, "start:step:stop (selection)");
  mc->add_option("--output", c.output, "per-replication CSV (summary at <output>.json)");

  auto* cmp = app.add_subcommand("compare-gdfm", "lattice estimator versus the stacked GDFM baseline");
  add_pipeline_options(cmp, c);
  cmp->add_option("--input", c.input, "input field");
  cmp->add_option("--output", c.output, "GDFM common component");
  cmp->add_option("--format", c.format, "csv or stf (default: by extension)");
  cmp->add_option("--q", c.q, "number of factors");
  cmp->add_option("--truth", c.truth, "true common component for E1/E2");
  cmp->add_option("--region", c.region, "all or interior");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : GSTFM_ERR_CONFIG;
  }

  try {
    if (*sim) return cmd_simulate(c);
    if (*est) return cmd_estimate(c);
    if (*sel) return cmd_select_q(c);
    if (*gap) return cmd_eigengap(c);
    if (*mc) return cmd_mc_study(c);
    if (*cmp) return cmd_compare_gdfm(c);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return GSTFM_ERR_INTERNAL;
  }
  return GSTFM_ERR_CONFIG;
}
