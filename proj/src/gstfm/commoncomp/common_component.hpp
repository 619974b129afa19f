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
#include <vector>

#include <json.hpp>

#include "gstfm/commoncomp/projection_filter.hpp"
#include "gstfm/core/lattice_field.hpp"
#include "gstfm/spectral/frequency_grid.hpp"
#include "gstfm/spectral/kernel.hpp"

namespace gstfm {

/// dense: n x n spectral matrices. factored: rank-limited representation via
/// a QR of the data, for n larger than the number of lattice points.
/// automatic picks factored exactly when n exceeds S1*S2*T.
enum class SpectralRoute { automatic, dense, factored };

std::string to_string(SpectralRoute route);

struct CommonComponentEstimate {
  LatticeField chi_hat;
  /// Zero-based inclusive bounds of the points with the full symmetric
  /// window; empty on an axis where lo > hi.
  std::array<int, 3> interior_lo{0, 0, 0};
  std::array<int, 3> interior_hi{0, 0, 0};
  int q = 0;
  BandwidthTriple bw{};
  TruncationSpec trunc{};
  KernelTriple kernels{};
  GridConvention convention = GridConvention::dft;
  SpectralRoute route = SpectralRoute::dense;
  std::vector<std::string> warnings;

  bool interior(int s1, int s2, int t) const {
    return s1 >= interior_lo[0] && s1 <= interior_hi[0] && s2 >= interior_lo[1] && s2 <= interior_hi[1] &&
           t >= interior_lo[2] && t <= interior_hi[2];
  }
  /// Lattice points in the interior box (per series).
  std::size_t interior_points() const;
};

/// Interior bounds M_d .. dim_d - 1 - M_d (zero-based).
void set_interior_bounds(CommonComponentEstimate& est, const LatticeDims& dims, const TruncationSpec& trunc);

/// Spectral estimate, eigenvectors, projection filter K = P^H P, lag
/// coefficients and truncated convolution, in that order. Demeans the field
/// if needed. Requires 0 <= q <= n.
CommonComponentEstimate estimate_common_component(const LatticeField& field, int q, const KernelTriple& kernels,
                                                  const BandwidthTriple& bw, const TruncationSpec& trunc,
                                                  GridConvention convention = GridConvention::dft, int threads = 1,
                                                  SpectralRoute route = SpectralRoute::automatic);

/// Settings echo (one-based interior bounds).
nlohmann::json common_settings_json(const CommonComponentEstimate& est);

} // namespace gstfm
