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

#include <array>
#include <cstdint>
#include <string>
#include <optional>
#include <vector>

#include <json.hpp>

#include "gstfm/commoncomp/common_component.hpp"
#include "gstfm/qselect/stability_scan.hpp"
#include "gstfm/spectral/frequency_grid.hpp"
#include "gstfm/spectral/kernel.hpp"

namespace gstfm {

/// Estimation and selection constants shared by the CLI, the C API and the
/// Monte Carlo harness. Unset bandwidths/truncations resolve to the defaults.
struct PipelineSettings {
  KernelTriple kernels = same_kernel(KernelSpec{KernelKind::epanechnikov});
  std::optional<BandwidthTriple> bw;
  std::optional<TruncationSpec> trunc;
  GridConvention convention = GridConvention::dft;
  SpectralRoute route = SpectralRoute::automatic;
  int threads = 1;

  int q_max = 10;
  std::vector<double> c_grid = make_c_grid(0.0, 0.0005, 3.0);
  SubsampleSpec subsamples{};
  StabilityOptions stability{};
};

/// Overrides fields present in `doc`: kernel (name or three names), bw, trunc,
/// grid, route, threads, qmax, cgrid ("start:step:stop"), subsample_step,
/// subsample_count, min_interval_fraction, c_manual.
void apply_settings_json(PipelineSettings& s, const nlohmann::json& doc);

/// Parses "a,b,c" into three integers.
std::array<int, 3> parse_triple(const std::string& text, const std::string& what);

/// Kernel per axis from "ep" or "ep,ep,bartlett".
KernelTriple parse_kernels(const std::string& text);

BandwidthTriple resolve_bandwidths(const PipelineSettings& s, const LatticeDims& dims);
TruncationSpec resolve_truncation(const PipelineSettings& s, const BandwidthTriple& bw, const LatticeDims& dims);

/// Common component with resolved constants.
CommonComponentEstimate run_estimate(const LatticeField& field, int q, const PipelineSettings& s);

/// Stability scan with resolved constants.
StabilityScan run_selection(const LatticeField& field, const PipelineSettings& s, std::uint64_t seed);

/// GDFM baseline with the temporal constants of the resolved settings.
CommonComponentEstimate run_gdfm(const LatticeField& field, int q, const PipelineSettings& s);

/// Echo of every resolved constant for the given lattice.
nlohmann::json settings_json(const PipelineSettings& s, const LatticeDims& dims);

} // namespace gstfm
