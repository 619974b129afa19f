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

#include "gstfm/simlab/gdfm.hpp"

namespace gstfm {

CommonComponentEstimate gdfm_baseline(const LatticeField& field, int q, KernelSpec kernel, int temporal_bandwidth,
                                      int temporal_truncation, GridConvention convention, int threads) {
  const StackedSeries layout = stack_to_time_series(field);
  const BandwidthTriple bw{{0, 0, temporal_bandwidth}};
  const TruncationSpec trunc{{0, 0, temporal_truncation}};
  CommonComponentEstimate est =
      estimate_common_component(layout.as_field(), q, same_kernel(kernel), bw, trunc, convention, threads);
  est.chi_hat = layout.unstack(est.chi_hat);
  set_interior_bounds(est, field.dims(), trunc);
  return est;
}

} // namespace gstfm
