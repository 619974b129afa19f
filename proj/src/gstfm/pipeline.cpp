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

#include "gstfm/pipeline.hpp"

#include <sstream>

#include "gstfm/simlab/gdfm.hpp"
#include "gstfm/util/error.hpp"

namespace gstfm {

std::array<int, 3> parse_triple(const std::string& text, const std::string& what) {
  std::array<int, 3> out{};
  std::istringstream is(text);
  std::string part;
  int i = 0;
  while (std::getline(is, part, ',')) {
    if (i == 3) throw ConfigError(what + " needs three comma-separated integers, got '" + text + "'");
    try {
      std::size_t used = 0;
      out[i] = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError(what + " needs three comma-separated integers, got '" + text + "'");
    }
    ++i;
  }
  if (i != 3) throw ConfigError(what + " needs three comma-separated integers, got '" + text + "'");
  return out;
}

KernelTriple parse_kernels(const std::string& text) {
  std::vector<std::string> names;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ',')) names.push_back(part);
  if (names.size() == 1) return same_kernel(parse_kernel(names[0]));
  if (names.size() != 3) throw ConfigError("kernel needs one or three names, got '" + text + "'");
  return {parse_kernel(names[0]), parse_kernel(names[1]), parse_kernel(names[2])};
}

void apply_settings_json(PipelineSettings& s, const nlohmann::json& doc) {
  try {
    if (doc.contains("kernel")) {
      const auto& k = doc.at("kernel");
      if (k.is_array()) {
        const auto names = k.get<std::vector<std::string>>();
        if (names.size() != 3) throw ConfigError("kernel array needs three names");
        s.kernels = {parse_kernel(names[0]), parse_kernel(names[1]), parse_kernel(names[2])};
      } else {
        s.kernels = parse_kernels(k.get<std::string>());
      }
    }
    if (doc.contains("bw")) s.bw = BandwidthTriple{doc.at("bw").get<std::array<int, 3>>()};
    if (doc.contains("trunc")) s.trunc = TruncationSpec{doc.at("trunc").get<std::array<int, 3>>()};
    if (doc.contains("grid")) s.convention = parse_grid_convention(doc.at("grid").get<std::string>());
    if (doc.contains("route")) {
      const auto r = doc.at("route").get<std::string>();
      if (r == "automatic") s.route = SpectralRoute::automatic;
      else if (r == "dense") s.route = SpectralRoute::dense;
      else if (r == "factored") s.route = SpectralRoute::factored;
      else throw ConfigError("unknown route '" + r + "'");
    }
    if (doc.contains("threads")) s.threads = doc.at("threads").get<int>();
    if (doc.contains("qmax")) s.q_max = doc.at("qmax").get<int>();
    if (doc.contains("cgrid")) s.c_grid = parse_c_grid(doc.at("cgrid").get<std::string>());
    if (doc.contains("subsample_step")) s.subsamples.step = doc.at("subsample_step").get<int>();
    if (doc.contains("subsample_count")) s.subsamples.count = doc.at("subsample_count").get<int>();
    if (doc.contains("min_interval_fraction"))
      s.stability.min_interval_fraction = doc.at("min_interval_fraction").get<double>();
    if (doc.contains("c_manual")) s.stability.c_manual = doc.at("c_manual").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad pipeline config: ") + e.what());
  }
}

BandwidthTriple resolve_bandwidths(const PipelineSettings& s, const LatticeDims& dims) {
  const BandwidthTriple bw = s.bw ? *s.bw : default_bandwidths(dims);
  bw.validate(dims);
  return bw;
}

TruncationSpec resolve_truncation(const PipelineSettings& s, const BandwidthTriple& bw, const LatticeDims& dims) {
  const TruncationSpec trunc = s.trunc ? *s.trunc : default_truncation(bw);
  trunc.validate(bw, dims);
  return trunc;
}

CommonComponentEstimate run_estimate(const LatticeField& field, int q, const PipelineSettings& s) {
  const BandwidthTriple bw = resolve_bandwidths(s, field.dims());
  return estimate_common_component(field, q, s.kernels, bw, resolve_truncation(s, bw, field.dims()), s.convention,
                                   s.threads, s.route);
}

StabilityScan run_selection(const LatticeField& field, const PipelineSettings& s, std::uint64_t seed) {
  const BandwidthTriple bw = resolve_bandwidths(s, field.dims());
  return stability_scan(field, s.q_max, s.c_grid, s.subsamples, s.kernels, bw, seed, s.stability, s.convention,
                        s.threads);
}

CommonComponentEstimate run_gdfm(const LatticeField& field, int q, const PipelineSettings& s) {
  const BandwidthTriple bw = resolve_bandwidths(s, field.dims());
  const TruncationSpec trunc = resolve_truncation(s, bw, field.dims());
  return gdfm_baseline(field, q, s.kernels[2], bw.b[2], trunc.m[2], s.convention, s.threads);
}

nlohmann::json settings_json(const PipelineSettings& s, const LatticeDims& dims) {
  const BandwidthTriple bw = resolve_bandwidths(s, dims);
  const TruncationSpec trunc = resolve_truncation(s, bw, dims);
  nlohmann::json doc;
  doc["kernels"] = {s.kernels[0].name(), s.kernels[1].name(), s.kernels[2].name()};
  doc["bandwidths"] = bw.b;
  doc["bandwidths_default"] = !s.bw.has_value();
  doc["truncation"] = trunc.m;
  doc["truncation_default"] = !s.trunc.has_value();
  doc["grid_convention"] = to_string(s.convention);
  doc["route"] = to_string(s.route);
  doc["threads"] = s.threads;
  doc["q_max"] = s.q_max;
  doc["c_grid"] = {{"start", s.c_grid.front()},
                   {"step", s.c_grid.size() > 1 ? s.c_grid[1] - s.c_grid[0] : 0.0},
                   {"stop", s.c_grid.back()},
                   {"points", s.c_grid.size()}};
  doc["subsamples"] = {{"step", s.subsamples.step}, {"count", s.subsamples.count}};
  doc["min_interval_fraction"] = s.stability.min_interval_fraction;
  if (s.stability.c_manual) doc["c_manual"] = *s.stability.c_manual;
  return doc;
}

} // namespace gstfm
