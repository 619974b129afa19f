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
#include <optional>
#include <string>
#include <vector>

#include "gstfm/core/lattice_field.hpp"
#include "gstfm/spectral/frequency_grid.hpp"
#include "gstfm/spectral/kernel.hpp"

namespace gstfm {

/// Subsample sizes n_j = n - step*j for j = 1..count.
struct SubsampleSpec {
  int step = 5;
  int count = 16;
};

/// c_l = start + l*step for l = 0.. while c_l <= stop (inclusive up to rounding).
std::vector<double> make_c_grid(double start, double step, double stop);

/// Parses "start:step:stop".
std::vector<double> parse_c_grid(const std::string& spec);

struct StabilityInterval {
  std::size_t first = 0;  // indices into the c grid, inclusive
  std::size_t last = 0;
  double c_lo = 0.0;
  double c_hi = 0.0;
  int q = 0;
};

struct StabilityOptions {
  /// Intervals after the first that are shorter than this fraction of the
  /// scanned c range are treated as transients and skipped.
  double min_interval_fraction = 0.05;
  std::optional<double> c_manual;
};

struct StabilityScan {
  std::vector<double> c_grid;
  std::vector<int> n_subsamples;           // n first, then decreasing
  std::vector<std::vector<int>> qhat_table;  // [c index][subsample index]
  std::vector<double> S_curve;
  std::vector<int> q_by_c;                 // q-hat at full n
  std::vector<double> base_penalties;      // penalty at c = 1 per subsample
  std::vector<StabilityInterval> intervals;
  std::optional<std::size_t> selected_interval;
  double selected_c = 0.0;
  int selected_q = 0;
  bool manual = false;
  int q_max = 0;
  std::uint64_t permutation_seed = 0;
  std::vector<int> permutation;  // zero-based series order
};

/// Population variance of q-hat across subsamples per c, intervals as
/// maximal runs of consecutive c with zero variance and a constant q-hat,
/// and the selected interval: the first qualifying interval after the one
/// that starts the scan. `qhat_table[c][0]` must be the full sample.
/// Throws NumericError when no second interval exists and no manual c is set.
void finalize_scan(StabilityScan& scan, const StabilityOptions& options);

/// Seeded permutation of 0..n-1 (Fisher-Yates on counter-based draws).
std::vector<int> seeded_permutation(int n, std::uint64_t seed);

/// One random ordering of the series; q-hat for every (c, n_j) from
/// principal submatrices of the full-sample estimate.
StabilityScan stability_scan(const LatticeField& field, int q_max, const std::vector<double>& c_grid,
                             const SubsampleSpec& subsamples, const KernelTriple& kernels, const BandwidthTriple& bw,
                             std::uint64_t seed, const StabilityOptions& options = {},
                             GridConvention convention = GridConvention::dft, int threads = 1);

/// CSV with header c,S_c,qhat_full.
std::string scan_to_csv(const StabilityScan& scan);
/// JSON summary: selection, intervals, subsample sizes, permutation seed.
std::string scan_summary_json(const StabilityScan& scan);

} // namespace gstfm
