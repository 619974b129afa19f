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

#include <json.hpp>

#include "gstfm/core/lattice_field.hpp"
#include "gstfm/util/counter_rng.hpp"

namespace gstfm {

enum class ModelKind { model_a, model_b };
enum class IdioKind { iid_gaussian, correlated };

ModelKind parse_model(const std::string& name);  // "a", "model_a", "b", "model_b"
IdioKind parse_idio(const std::string& name);    // "iid", "iid_gaussian", "correlated"
std::string to_string(ModelKind model);
std::string to_string(IdioKind idio);

struct SimConfig {
  ModelKind model = ModelKind::model_b;
  int n = 10;
  LatticeDims dims{10, 10, 10};
  int q = 2;
  IdioKind idio = IdioKind::iid_gaussian;
  std::uint64_t seed = 1;
  int ra = 40;  // model (a) filter radius per axis
  int replications = 1;

  /// Throws ConfigError on invalid sizes.
  void validate() const;
};

nlohmann::json to_json(const SimConfig& cfg);

/// Overrides fields present in `doc`: model, n, dims, q, idio, seed, ra, replications.
void apply_sim_json(SimConfig& cfg, const nlohmann::json& doc);

struct SimOutput {
  LatticeField x;
  LatticeField chi;
};

/// Individual draws behind the simulators, keyed by zero-based indices
/// (shock coordinates may be negative on the padding).
namespace draws {
double loading(const CounterRng& rng, int ell, int j);            // a_lj
double decay(const CounterRng& rng, int ell, int j);              // b_lj
double shock(const CounterRng& rng, int j, int s1, int s2, int t);  // u_j
double noise(const CounterRng& rng, int ell, int s1, int s2, int t);
double idio_shock(const CounterRng& rng, int m, int s1, int s2, int t);  // v_m
double idio_coef(const CounterRng& rng, int ell, int j, int k1, int k2, int k3);  // c_ljk
} // namespace draws

/// chi = sum_j a_lj sum_{|k_d| <= ra} b_lj^{|k1|+|k2|+|k3|} u_{j, s-k}, with
/// a, u standard normal and b uniform on [0.5, 0.8].
LatticeField simulate_common_a(const SimConfig& cfg, const CounterRng& rng, int threads = 1);

/// chi = sum_j a_lj sum_{k in [-1,1]x[-1,1]x[0,1]} 0.5^{|k1|+|k2|+|k3|} u_{j, s-k}.
LatticeField simulate_common_b(const SimConfig& cfg, const CounterRng& rng, int threads = 1);

LatticeField simulate_idio_iid(const SimConfig& cfg, const CounterRng& rng);

/// xi_l = sum_{k in [-1,1]x[-1,1]x[0,1]} sum_{j=0..4} 0.5^{|k|+j} c_ljk v_{l+j, s-k},
/// v standard normal over n+4 series, c uniform on [0.5, 0.8].
LatticeField simulate_idio_correlated(const SimConfig& cfg, const CounterRng& rng, int threads = 1);

/// x = chi + xi for replication r, drawn from CounterRng(cfg.seed).substream(r).
SimOutput simulate(const SimConfig& cfg, std::uint64_t replication = 0, int threads = 1);

} // namespace gstfm
