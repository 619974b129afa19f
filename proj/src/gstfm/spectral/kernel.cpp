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

#include "gstfm/spectral/kernel.hpp"

#include <cmath>

#include "gstfm/util/error.hpp"

namespace gstfm {

// Stand-in for an infinite order of contact; B^smoothness stays finite for B = 2.
constexpr double kTruncatedSmoothness = 1000.0;

double KernelSpec::smoothness() const {
  switch (kind) {
  case KernelKind::epanechnikov: return 2.0;
  case KernelKind::bartlett: return 1.0;
  case KernelKind::truncated: return kTruncatedSmoothness;
  }
  return 2.0;
}

std::string KernelSpec::name() const {
  switch (kind) {
  case KernelKind::epanechnikov: return "epanechnikov";
  case KernelKind::bartlett: return "bartlett";
  case KernelKind::truncated: return "truncated";
  }
  return "epanechnikov";
}

double kernel_eval(const KernelSpec& kernel, double u) {
  const double a = std::abs(u);
  switch (kernel.kind) {
  case KernelKind::epanechnikov: return a < 1.0 ? 1.0 - u * u : 0.0;
  case KernelKind::bartlett: return a < 1.0 ? 1.0 - a : 0.0;
  case KernelKind::truncated: return a <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

KernelSpec parse_kernel(const std::string& name) {
  if (name == "ep" || name == "epanechnikov") return {KernelKind::epanechnikov};
  if (name == "bartlett") return {KernelKind::bartlett};
  if (name == "trunc" || name == "truncated") return {KernelKind::truncated};
  throw ConfigError("unknown kernel '" + name + "' (expected ep, bartlett or trunc)");
}

} // namespace gstfm
