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

#include "gstfm/commoncomp/common_component.hpp"
#include "gstfm/core/lattice_field.hpp"

namespace gstfm {

/// Purely temporal dynamic factor analysis of the n*S1*S2 stacked location
/// series: the lattice pipeline with spatial bandwidths and truncations 0.
/// The estimate is unstacked back to the field shape; its interior box only
/// restricts time.
CommonComponentEstimate gdfm_baseline(const LatticeField& field, int q, KernelSpec kernel, int temporal_bandwidth,
                                      int temporal_truncation, GridConvention convention = GridConvention::dft,
                                      int threads = 1);

} // namespace gstfm
