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

#include "gstfm/simlab/models.hpp"

#include <cmath>
#include <vector>

#include "gstfm/util/error.hpp"
#include "gstfm/util/parallel.hpp"

namespace gstfm {
namespace {

enum Role : std::int64_t { loading = 1, decay = 2, shock = 3, noise = 4, idio_shock = 5, idio_coef = 6 };

// Values on a box [lo_d, lo_d + ext_d) stored with t fastest.
struct Box {
  std::array<int, 3> lo{};
  std::array<int, 3> ext{};
  std::vector<double> v;

  std::size_t index(int a, int b, int c) const {
    return (static_cast<std::size_t>(a) * ext[1] + b) * ext[2] + c;
  }
};

Box shock_box(const CounterRng& rng, std::int64_t role, std::int64_t series, std::array<int, 3> lo,
              std::array<int, 3> ext) {
  Box box{lo, ext, std::vector<double>(static_cast<std::size_t>(ext[0]) * ext[1] * ext[2])};
  std::size_t i = 0;
  for (int a = 0; a < ext[0]; ++a)
    for (int b = 0; b < ext[1]; ++b)
      for (int c = 0; c < ext[2]; ++c)
        box.v[i++] = rng.normal({role, series, lo[0] + a, lo[1] + b, lo[2] + c});
  return box;
}

// out(p) = sum_{|k| <= R} w^{|k|} in(p + R - k) along `axis`; the axis
// shrinks by 2R.
Box decay_pass(const Box& in, int axis, int R, double w) {
  Box out = in;
  out.ext[axis] = in.ext[axis] - 2 * R;
  out.lo[axis] = in.lo[axis] + R;
  out.v.assign(static_cast<std::size_t>(out.ext[0]) * out.ext[1] * out.ext[2], 0.0);
  std::vector<double> taps(2 * R + 1);
  for (int k = -R; k <= R; ++k) taps[k + R] = std::pow(w, std::abs(k));
  const std::size_t stride_in = axis == 2 ? 1 : (axis == 1 ? in.ext[2] : static_cast<std::size_t>(in.ext[1]) * in.ext[2]);
  for (int a = 0; a < out.ext[0]; ++a)
    for (int b = 0; b < out.ext[1]; ++b)
      for (int c = 0; c < out.ext[2]; ++c) {
        std::array<int, 3> p{a, b, c};
        p[axis] += R;
        const std::size_t centre = in.index(p[0], p[1], p[2]);
        double acc = 0.0;
        for (int k = -R; k <= R; ++k)
          acc += taps[k + R] * in.v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(centre) -
                                                             static_cast<std::ptrdiff_t>(k) * stride_in)];
        out.v[out.index(a, b, c)] = acc;
      }
  return out;
}

} // namespace

namespace draws {
double loading(const CounterRng& rng, int ell, int j) { return rng.normal({Role::loading, ell, j}); }
double decay(const CounterRng& rng, int ell, int j) { return rng.uniform(0.5, 0.8, {Role::decay, ell, j}); }
double shock(const CounterRng& rng, int j, int s1, int s2, int t) { return rng.normal({Role::shock, j, s1, s2, t}); }
double noise(const CounterRng& rng, int ell, int s1, int s2, int t) {
  return rng.normal({Role::noise, ell, s1, s2, t});
}
double idio_shock(const CounterRng& rng, int m, int s1, int s2, int t) {
  return rng.normal({Role::idio_shock, m, s1, s2, t});
}
double idio_coef(const CounterRng& rng, int ell, int j, int k1, int k2, int k3) {
  return rng.uniform(0.5, 0.8, {Role::idio_coef, ell, j, k1, k2, k3});
}
} // namespace draws

ModelKind parse_model(const std::string& name) {
  if (name == "a" || name == "model_a") return ModelKind::model_a;
  if (name == "b" || name == "model_b") return ModelKind::model_b;
  throw ConfigError("unknown model '" + name + "' (expected a or b)");
}

IdioKind parse_idio(const std::string& name) {
  if (name == "iid" || name == "iid_gaussian") return IdioKind::iid_gaussian;
  if (name == "correlated") return IdioKind::correlated;
  throw ConfigError("unknown idiosyncratic model '" + name + "' (expected iid or correlated)");
}

std::string to_string(ModelKind model) { return model == ModelKind::model_a ? "model_a" : "model_b"; }
std::string to_string(IdioKind idio) { return idio == IdioKind::iid_gaussian ? "iid_gaussian" : "correlated"; }

void SimConfig::validate() const {
  if (n < 1) throw ConfigError("n must be positive");
  if (dims.s1 < 1 || dims.s2 < 1 || dims.t < 1) throw ConfigError("dims must be positive, got " + to_string(dims));
  if (q < 0) throw ConfigError("q must be non-negative");
  if (model == ModelKind::model_a && ra < 1) throw ConfigError("model (a) radius must be at least 1");
  if (replications < 1) throw ConfigError("replication count must be positive");
}

nlohmann::json to_json(const SimConfig& cfg) {
  return {{"model", to_string(cfg.model)}, {"n", cfg.n},       {"dims", cfg.dims.as_array()},
          {"q", cfg.q},                    {"idio", to_string(cfg.idio)}, {"seed", cfg.seed},
          {"ra", cfg.ra},                  {"replications", cfg.replications}};
}

void apply_sim_json(SimConfig& cfg, const nlohmann::json& doc) {
  try {
    if (doc.contains("model")) cfg.model = parse_model(doc.at("model").get<std::string>());
    if (doc.contains("n")) cfg.n = doc.at("n").get<int>();
    if (doc.contains("dims")) {
      const auto d = doc.at("dims").get<std::vector<int>>();
      if (d.size() != 3) throw ConfigError("dims must have three entries");
      cfg.dims = {d[0], d[1], d[2]};
    }
    if (doc.contains("q")) cfg.q = doc.at("q").get<int>();
    if (doc.contains("idio")) cfg.idio = parse_idio(doc.at("idio").get<std::string>());
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("ra")) cfg.ra = doc.at("ra").get<int>();
    if (doc.contains("replications")) cfg.replications = doc.at("replications").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad simulation config: ") + e.what());
  }
}

LatticeField simulate_common_a(const SimConfig& cfg, const CounterRng& rng, int threads) {
  cfg.validate();
  const LatticeDims d = cfg.dims;
  const int R = cfg.ra;
  std::vector<double> chi(static_cast<std::size_t>(cfg.n) * d.points(), 0.0);
  for (int j = 0; j < cfg.q; ++j) {
    const Box u = shock_box(rng, Role::shock, j, {-R, -R, -R}, {d.s1 + 2 * R, d.s2 + 2 * R, d.t + 2 * R});
    parallel_for(static_cast<std::size_t>(cfg.n), threads, [&](std::size_t l) {
      const auto ell = static_cast<std::int64_t>(l);
      const double a = draws::loading(rng, static_cast<int>(ell), j);
      const double b = draws::decay(rng, static_cast<int>(ell), j);
      Box f = decay_pass(u, 0, R, b);
      f = decay_pass(f, 1, R, b);
      f = decay_pass(f, 2, R, b);
      double* dst = chi.data() + l * d.points();
      for (std::size_t p = 0; p < d.points(); ++p) dst[p] += a * f.v[p];
    });
  }
  return LatticeField(cfg.n, d, std::move(chi));
}

LatticeField simulate_common_b(const SimConfig& cfg, const CounterRng& rng, int threads) {
  cfg.validate();
  const LatticeDims d = cfg.dims;
  const std::size_t P = d.points();
  std::vector<std::vector<double>> filtered(cfg.q, std::vector<double>(P, 0.0));
  parallel_for(static_cast<std::size_t>(cfg.q), threads, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const Box u = shock_box(rng, Role::shock, j, {-1, -1, -1}, {d.s1 + 2, d.s2 + 2, d.t + 1});
    auto& f = filtered[jj];
    std::size_t p = 0;
    for (int s1 = 0; s1 < d.s1; ++s1)
      for (int s2 = 0; s2 < d.s2; ++s2)
        for (int t = 0; t < d.t; ++t, ++p) {
          double acc = 0.0;
          for (int k1 = -1; k1 <= 1; ++k1)
            for (int k2 = -1; k2 <= 1; ++k2)
              for (int k3 = 0; k3 <= 1; ++k3)
                acc += std::ldexp(1.0, -(std::abs(k1) + std::abs(k2) + k3)) *
                       u.v[u.index(s1 - k1 + 1, s2 - k2 + 1, t - k3 + 1)];
          f[p] = acc;
        }
  });
  std::vector<double> chi(static_cast<std::size_t>(cfg.n) * P, 0.0);
  for (int ell = 0; ell < cfg.n; ++ell) {
    double* dst = chi.data() + static_cast<std::size_t>(ell) * P;
    for (int j = 0; j < cfg.q; ++j) {
      const double a = draws::loading(rng, ell, j);
      for (std::size_t p = 0; p < P; ++p) dst[p] += a * filtered[j][p];
    }
  }
  return LatticeField(cfg.n, d, std::move(chi));
}

LatticeField simulate_idio_iid(const SimConfig& cfg, const CounterRng& rng) {
  cfg.validate();
  const LatticeDims d = cfg.dims;
  std::vector<double> xi(static_cast<std::size_t>(cfg.n) * d.points());
  std::size_t i = 0;
  for (int ell = 0; ell < cfg.n; ++ell)
    for (int s1 = 0; s1 < d.s1; ++s1)
      for (int s2 = 0; s2 < d.s2; ++s2)
        for (int t = 0; t < d.t; ++t) xi[i++] = draws::noise(rng, ell, s1, s2, t);
  return LatticeField(cfg.n, d, std::move(xi));
}

LatticeField simulate_idio_correlated(const SimConfig& cfg, const CounterRng& rng, int threads) {
  cfg.validate();
  const LatticeDims d = cfg.dims;
  const std::size_t P = d.points();
  const int series = cfg.n + 4;
  std::vector<Box> v(series);
  parallel_for(static_cast<std::size_t>(series), threads, [&](std::size_t m) {
    v[m] = shock_box(rng, Role::idio_shock, static_cast<std::int64_t>(m), {-1, -1, -1}, {d.s1 + 2, d.s2 + 2, d.t + 1});
  });
  std::vector<double> xi(static_cast<std::size_t>(cfg.n) * P, 0.0);
  parallel_for(static_cast<std::size_t>(cfg.n), threads, [&](std::size_t l) {
    const auto ell = static_cast<std::int64_t>(l);
    double* dst = xi.data() + l * P;
    for (int j = 0; j <= 4; ++j)
      for (int k1 = -1; k1 <= 1; ++k1)
        for (int k2 = -1; k2 <= 1; ++k2)
          for (int k3 = 0; k3 <= 1; ++k3) {
            const double c = draws::idio_coef(rng, static_cast<int>(ell), j, k1, k2, k3);
            const double w = std::ldexp(c, -(std::abs(k1) + std::abs(k2) + k3 + j));
            const Box& src = v[l + j];
            std::size_t p = 0;
            for (int s1 = 0; s1 < d.s1; ++s1)
              for (int s2 = 0; s2 < d.s2; ++s2) {
                const double* row = &src.v[src.index(s1 - k1 + 1, s2 - k2 + 1, 1 - k3)];
                for (int t = 0; t < d.t; ++t, ++p) dst[p] += w * row[t];
              }
          }
  });
  return LatticeField(cfg.n, d, std::move(xi));
}

SimOutput simulate(const SimConfig& cfg, std::uint64_t replication, int threads) {
  cfg.validate();
  const CounterRng rng = CounterRng(cfg.seed).substream(replication);
  LatticeField chi = cfg.q == 0 ? LatticeField::zeros(cfg.n, cfg.dims)
                     : cfg.model == ModelKind::model_a ? simulate_common_a(cfg, rng, threads)
                                                       : simulate_common_b(cfg, rng, threads);
  const LatticeField xi =
      cfg.idio == IdioKind::iid_gaussian ? simulate_idio_iid(cfg, rng) : simulate_idio_correlated(cfg, rng, threads);
  std::vector<double> x(chi.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = chi.values()[i] + xi.values()[i];
  return {LatticeField(cfg.n, cfg.dims, std::move(x)), std::move(chi)};
}

} // namespace gstfm
