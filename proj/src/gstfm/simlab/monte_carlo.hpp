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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstfm/pipeline.hpp"
#include "gstfm/simlab/metrics.hpp"
#include "gstfm/simlab/models.hpp"

namespace gstfm {

/// estimation: E1/E2 of the lattice estimator. comparison: E1/E2 of both the
/// lattice estimator and the stacked GDFM baseline. selection: q-hat from
/// the stability scan.
enum class StudyKind { estimation, comparison, selection };

StudyKind parse_study(const std::string& name);
std::string to_string(StudyKind kind);

struct MCReplication {
  int index = 0;
  std::uint64_t stream_seed = 0;
  ErrorMetrics all;
  ErrorMetrics interior;
  ErrorMetrics gdfm_all;
  ErrorMetrics gdfm_interior;
  int qhat = -1;  // -1: scan found no second stability interval
  double selected_c = 0.0;
  std::string note;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

struct MCResult {
  StudyKind kind = StudyKind::estimation;
  SimConfig sim;
  PipelineSettings settings;
  std::vector<MCReplication> reps;
  bool true_chi_retained = false;

  MeanSe e1, e2, e1_interior, e2_interior;
  MeanSe gdfm_e1, gdfm_e2;
  int gstfm_better = 0;  // replications with lattice E1 < GDFM E1
  double correct_rate = 0.0;
  double under_rate = 0.0;
  double over_rate = 0.0;
};

struct MCStudySpec {
  SimConfig sim;
  PipelineSettings settings;
  StudyKind kind = StudyKind::estimation;
};

/// Keys: model, n, dims, q, idio, seed, ra, replications, study, plus the
/// pipeline keys of apply_settings_json.
MCStudySpec mc_spec_from_json(const nlohmann::json& doc);

/// Replication r draws from CounterRng(seed).substream(r); results do not
/// depend on `threads` (replications run in parallel, pipelines serially).
MCResult run_mc_study(const SimConfig& sim, const PipelineSettings& settings, StudyKind kind, int threads = 1);

std::string mc_to_csv(const MCResult& result);
nlohmann::json mc_summary_json(const MCResult& result);

} // namespace gstfm
