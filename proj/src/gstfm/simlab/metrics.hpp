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
#include <string>

#include "gstfm/commoncomp/common_component.hpp"
#include "gstfm/core/lattice_field.hpp"

namespace gstfm {

enum class Region { all, interior };

Region parse_region(const std::string& name);
std::string to_string(Region region);

struct ErrorMetrics {
  double e1 = 0.0;      // mean squared error
  double e2 = 0.0;      // sum (chi_hat - chi)^2 / sum chi^2
  double sse = 0.0;
  double chi_ss = 0.0;
  std::size_t points = 0;
};

/// Metrics over the zero-based inclusive box lo..hi of every series. With
/// want_e2, throws DataError when sum chi^2 = 0.
ErrorMetrics error_metrics(const LatticeField& chi_hat, const LatticeField& chi_true, std::array<int, 3> lo,
                           std::array<int, 3> hi, bool want_e2 = true);

/// region = all uses every point; interior uses the estimate's interior box.
ErrorMetrics error_metrics(const CommonComponentEstimate& est, const LatticeField& chi_true, Region region,
                           bool want_e2 = true);

/// Whole-lattice variant.
ErrorMetrics error_metrics(const LatticeField& chi_hat, const LatticeField& chi_true, bool want_e2 = true);

} // namespace gstfm
