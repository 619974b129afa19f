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

namespace gstfm {

enum class KernelKind { epanechnikov, bartlett, truncated };

/// Lag-window kernel on [-1, 1] with K(0) = 1.
struct KernelSpec {
  KernelKind kind = KernelKind::epanechnikov;

  /// Order of contact at the origin, |K(u) - 1| = O(|u|^smoothness).
  double smoothness() const;
  std::string name() const;
};

/// epanechnikov: max(0, 1 - u^2); bartlett: max(0, 1 - |u|); truncated: 1 on |u| <= 1.
double kernel_eval(const KernelSpec& kernel, double u);

/// Accepts "ep", "epanechnikov", "bartlett", "trunc", "truncated".
KernelSpec parse_kernel(const std::string& name);

using KernelTriple = std::array<KernelSpec, 3>;

inline KernelTriple same_kernel(KernelSpec k) { return {k, k, k}; }

} // namespace gstfm
