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

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace gstfm {

/// Stateless counter-based random numbers. Every draw is a pure function of
/// its key (seed, replication, stream role, coordinates), so simulated values
/// do not depend on generation order, padding or thread scheduling.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Derive an independent generator, e.g. for replication r.
  CounterRng substream(std::uint64_t index) const { return CounterRng(hash({index, 0x5eedULL})); }

  std::uint64_t bits(std::initializer_list<std::int64_t> key) const {
    std::uint64_t h = seed_;
    for (auto k : key) h = mix(h ^ mix(static_cast<std::uint64_t>(k) + 0x9e3779b97f4a7c15ULL));
    return mix(h);
  }

  /// Uniform on the open interval (0, 1).
  double uniform(std::initializer_list<std::int64_t> key) const { return to_unit(bits(key)); }

  double uniform(double lo, double hi, std::initializer_list<std::int64_t> key) const {
    return lo + (hi - lo) * uniform(key);
  }

  /// Standard normal via Box-Muller on two decorrelated hashes of the key.
  double normal(std::initializer_list<std::int64_t> key) const {
    const std::uint64_t h = bits(key);
    const double u1 = to_unit(h);
    const double u2 = to_unit(mix(h ^ 0xd1b54a32d192ed03ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t seed() const { return seed_; }

private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static double to_unit(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  }
  std::uint64_t hash(std::initializer_list<std::uint64_t> key) const {
    std::uint64_t h = seed_;
    for (auto k : key) h = mix(h ^ mix(k));
    return h;
  }

  std::uint64_t seed_;
};

} // namespace gstfm
