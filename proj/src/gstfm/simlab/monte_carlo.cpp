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

#include "gstfm/simlab/monte_carlo.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "gstfm/util/error.hpp"
#include "gstfm/util/parallel.hpp"

namespace gstfm {
namespace {

MeanSe summarize(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

nlohmann::json to_json(const MeanSe& m) { return {{"mean", m.mean}, {"se", m.se}}; }

} // namespace

StudyKind parse_study(const std::string& name) {
  if (name == "estimation") return StudyKind::estimation;
  if (name == "comparison" || name == "compare-gdfm") return StudyKind::comparison;
  if (name == "selection") return StudyKind::selection;
  throw ConfigError("unknown study '" + name + "' (expected estimation, comparison or selection)");
}

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::estimation: return "estimation";
    case StudyKind::comparison: return "comparison";
    case StudyKind::selection: return "selection";
  }
  return "estimation";
}

MCStudySpec mc_spec_from_json(const nlohmann::json& doc) {
  MCStudySpec spec;
  apply_sim_json(spec.sim, doc);
  apply_settings_json(spec.settings, doc);
  if (doc.contains("study")) spec.kind = parse_study(doc.at("study").get<std::string>());
  return spec;
}

MCResult run_mc_study(const SimConfig& sim, const PipelineSettings& settings, StudyKind kind, int threads) {
  sim.validate();
  MCResult res;
  res.kind = kind;
  res.sim = sim;
  res.settings = settings;
  res.reps.resize(sim.replications);
  const int outer = std::min(resolve_threads(threads), sim.replications);
  PipelineSettings inner = settings;
  if (outer > 1) inner.threads = 1;

  parallel_for(static_cast<std::size_t>(sim.replications), outer, [&](std::size_t r) {
    MCReplication& rep = res.reps[r];
    rep.index = static_cast<int>(r);
    const CounterRng stream = CounterRng(sim.seed).substream(r);
    rep.stream_seed = stream.seed();
    try {
      const SimOutput data = simulate(sim, r, inner.threads);
      if (kind == StudyKind::selection) {
        try {
          const StabilityScan scan = run_selection(data.x, inner, stream.bits({0x7363616eLL}));
          rep.qhat = scan.selected_q;
          rep.selected_c = scan.selected_c;
        } catch (const NumericError& e) {
          rep.qhat = -1;
          rep.note = e.what();
        }
        return;
      }
      const auto est = run_estimate(data.x, sim.q, inner);
      rep.all = error_metrics(est, data.chi, Region::all);
      rep.interior = error_metrics(est, data.chi, Region::interior);
      if (kind == StudyKind::comparison) {
        const auto gdfm = run_gdfm(data.x, sim.q, inner);
        rep.gdfm_all = error_metrics(gdfm, data.chi, Region::all);
        rep.gdfm_interior = error_metrics(gdfm, data.chi, Region::interior);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "replication " + std::to_string(r) + " (stream seed " + std::to_string(rep.stream_seed) +
                                "): " + e.what());
    }
  });

  std::vector<double> e1, e2, e1i, e2i, g1, g2;
  int correct = 0, under = 0, over = 0;
  for (const auto& rep : res.reps) {
    if (kind == StudyKind::selection) {
      if (rep.qhat == sim.q) ++correct;
      else if (rep.qhat >= 0 && rep.qhat < sim.q) ++under;
      else if (rep.qhat > sim.q) ++over;
      continue;
    }
    e1.push_back(rep.all.e1);
    e2.push_back(rep.all.e2);
    e1i.push_back(rep.interior.e1);
    e2i.push_back(rep.interior.e2);
    if (kind == StudyKind::comparison) {
      g1.push_back(rep.gdfm_all.e1);
      g2.push_back(rep.gdfm_all.e2);
      if (rep.all.e1 < rep.gdfm_all.e1) ++res.gstfm_better;
    }
  }
  res.e1 = summarize(e1);
  res.e2 = summarize(e2);
  res.e1_interior = summarize(e1i);
  res.e2_interior = summarize(e2i);
  res.gdfm_e1 = summarize(g1);
  res.gdfm_e2 = summarize(g2);
  const double R = static_cast<double>(sim.replications);
  res.correct_rate = correct / R;
  res.under_rate = under / R;
  res.over_rate = over / R;
  return res;
}

std::string mc_to_csv(const MCResult& result) {
  std::ostringstream os;
  char buf[512];
  if (result.kind == StudyKind::selection) {
    os << "replication,stream_seed,qhat,selected_c,note\n";
    for (const auto& r : result.reps) {
      std::snprintf(buf, sizeof buf, "%d,%llu,%d,%.17g,", r.index, static_cast<unsigned long long>(r.stream_seed),
                    r.qhat, r.selected_c);
      os << buf << '"' << r.note << '"' << "\n";
    }
    return os.str();
  }
  os << "replication,stream_seed,E1,E2,E1_interior,E2_interior";
  if (result.kind == StudyKind::comparison) os << ",gdfm_E1,gdfm_E2,gdfm_E1_interior,gdfm_E2_interior";
  os << "\n";
  for (const auto& r : result.reps) {
    std::snprintf(buf, sizeof buf, "%d,%llu,%.17g,%.17g,%.17g,%.17g", r.index,
                  static_cast<unsigned long long>(r.stream_seed), r.all.e1, r.all.e2, r.interior.e1, r.interior.e2);
    os << buf;
    if (result.kind == StudyKind::comparison) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g", r.gdfm_all.e1, r.gdfm_all.e2, r.gdfm_interior.e1,
                    r.gdfm_interior.e2);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

nlohmann::json mc_summary_json(const MCResult& result) {
  nlohmann::json doc;
  doc["study"] = to_string(result.kind);
  doc["simulation"] = to_json(result.sim);
  doc["settings"] = settings_json(result.settings, result.sim.dims);
  doc["replications"] = result.reps.size();
  doc["true_chi_retained"] = result.true_chi_retained;
  if (result.kind == StudyKind::selection) {
    doc["q"] = result.sim.q;
    doc["correct_rate"] = result.correct_rate;
    doc["under_identification"] = result.under_rate;
    doc["over_identification"] = result.over_rate;
    doc["no_interval"] = 1.0 - result.correct_rate - result.under_rate - result.over_rate;
    return doc;
  }
  doc["E1"] = to_json(result.e1);
  doc["E2"] = to_json(result.e2);
  doc["E1_interior"] = to_json(result.e1_interior);
  doc["E2_interior"] = to_json(result.e2_interior);
  if (result.kind == StudyKind::comparison) {
    doc["gdfm_E1"] = to_json(result.gdfm_e1);
    doc["gdfm_E2"] = to_json(result.gdfm_e2);
    doc["gstfm_better"] = result.gstfm_better;
  }
  return doc;
}

} // namespace gstfm
