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

#include "gstfm/qselect/stability_scan.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gstfm/dynpca/eigensystem.hpp"
#include "gstfm/qselect/criterion.hpp"
#include "gstfm/spectral/spectral_density.hpp"
#include "gstfm/util/counter_rng.hpp"
#include "gstfm/util/error.hpp"

namespace gstfm {
namespace {

int argmin_ic(const std::vector<double>& log_tail, double penalty) {
  int best = 0;
  double best_v = log_tail[0];
  for (std::size_t k = 1; k < log_tail.size(); ++k) {
    const double v = log_tail[k] + static_cast<double>(k) * penalty;
    if (v < best_v) {
      best_v = v;
      best = static_cast<int>(k);
    }
  }
  return best;
}

} // namespace

std::vector<double> make_c_grid(double start, double step, double stop) {
  if (!(step > 0.0) || !(stop >= start) || !(start >= 0.0))
    throw ConfigError("c grid needs 0 <= start <= stop and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t l = 0; l < count; ++l) grid[l] = start + static_cast<double>(l) * step;
  return grid;
}

std::vector<double> parse_c_grid(const std::string& spec) {
  double v[3];
  std::istringstream is(spec);
  std::string part;
  int i = 0;
  while (std::getline(is, part, ':')) {
    if (i == 3) throw ConfigError("c grid must be start:step:stop, got '" + spec + "'");
    try {
      std::size_t used = 0;
      v[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("c grid must be start:step:stop, got '" + spec + "'");
    }
    ++i;
  }
  if (i != 3) throw ConfigError("c grid must be start:step:stop, got '" + spec + "'");
  return make_c_grid(v[0], v[1], v[2]);
}

std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  const CounterRng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.bits({0x7065726dLL, i}) % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

void finalize_scan(StabilityScan& scan, const StabilityOptions& options) {
  const std::size_t C = scan.c_grid.size();
  if (C == 0) throw ConfigError("empty c grid");
  if (scan.qhat_table.size() != C) throw ConfigError("qhat table rows must match the c grid");
  for (std::size_t l = 1; l < C; ++l)
    if (!(scan.c_grid[l] > scan.c_grid[l - 1])) throw ConfigError("c grid must be strictly increasing");

  scan.S_curve.assign(C, 0.0);
  scan.q_by_c.assign(C, 0);
  for (std::size_t l = 0; l < C; ++l) {
    const auto& row = scan.qhat_table[l];
    if (row.empty()) throw ConfigError("qhat table row is empty");
    double mean = 0.0;
    for (int q : row) mean += q;
    mean /= static_cast<double>(row.size());
    double var = 0.0;
    for (int q : row) var += (q - mean) * (q - mean);
    scan.S_curve[l] = var / static_cast<double>(row.size());
    scan.q_by_c[l] = row.front();
  }

  scan.intervals.clear();
  for (std::size_t l = 0; l < C;) {
    if (scan.S_curve[l] != 0.0) {
      ++l;
      continue;
    }
    std::size_t e = l;
    while (e + 1 < C && scan.S_curve[e + 1] == 0.0 && scan.q_by_c[e + 1] == scan.q_by_c[l]) ++e;
    scan.intervals.push_back({l, e, scan.c_grid[l], scan.c_grid[e], scan.q_by_c[l]});
    l = e + 1;
  }

  scan.selected_interval.reset();
  const double span = scan.c_grid.back() - scan.c_grid.front();
  for (std::size_t i = 1; i < scan.intervals.size(); ++i) {
    const auto& iv = scan.intervals[i];
    if (iv.c_hi - iv.c_lo >= options.min_interval_fraction * span) {
      scan.selected_interval = i;
      break;
    }
  }
  scan.manual = options.c_manual.has_value();
  if (scan.manual) return;
  if (!scan.selected_interval)
    throw NumericError("no second stability interval; widen c_grid");
  const auto& iv = scan.intervals[*scan.selected_interval];
  scan.selected_c = scan.c_grid[(iv.first + iv.last) / 2];
  scan.selected_q = iv.q;
}

StabilityScan stability_scan(const LatticeField& field, int q_max, const std::vector<double>& c_grid,
                             const SubsampleSpec& subsamples, const KernelTriple& kernels, const BandwidthTriple& bw,
                             std::uint64_t seed, const StabilityOptions& options, GridConvention convention,
                             int threads) {
  const int n = field.n();
  if (subsamples.count < 0 || subsamples.step < 1) throw ConfigError("subsample spec needs step >= 1, count >= 0");
  if (q_max < 0) throw ConfigError("q_max must be non-negative");
  StabilityScan scan;
  scan.c_grid = c_grid;
  scan.q_max = q_max;
  scan.permutation_seed = seed;
  scan.n_subsamples.push_back(n);
  for (int j = 1; j <= subsamples.count; ++j) scan.n_subsamples.push_back(n - subsamples.step * j);
  for (int m : scan.n_subsamples)
    if (m <= q_max)
      throw ConfigError("subsample size " + std::to_string(m) + " must exceed q_max=" + std::to_string(q_max));

  const LatticeField x = ensure_demeaned(field);
  const auto full = estimate_spectral_density(x, kernels, bw, convention, threads);
  scan.permutation = seeded_permutation(n, seed);

  const std::size_t J = scan.n_subsamples.size();
  std::vector<std::vector<double>> log_tail(J);
  scan.base_penalties.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    const int m = scan.n_subsamples[j];
    const std::vector<int> order(scan.permutation.begin(), scan.permutation.begin() + m);
    const auto eig = dynamic_eigenvalues(principal_submatrix(full, order), threads);
    const auto ic = information_criteria(clamped_average_eigenvalues(eig), q_max, 0.0);
    log_tail[j] = ic.values;
    scan.base_penalties[j] = penalty_value(make_penalty(m, x.dims(), bw, kernels, 1.0));
  }

  scan.qhat_table.assign(c_grid.size(), std::vector<int>(J, 0));
  for (std::size_t l = 0; l < c_grid.size(); ++l)
    for (std::size_t j = 0; j < J; ++j) scan.qhat_table[l][j] = argmin_ic(log_tail[j], c_grid[l] * scan.base_penalties[j]);

  finalize_scan(scan, options);
  if (options.c_manual) {
    const double c = *options.c_manual;
    if (!(c >= 0.0)) throw ConfigError("--c-manual must be non-negative");
    scan.selected_c = c;
    scan.selected_q = argmin_ic(log_tail[0], c * scan.base_penalties[0]);
  }
  return scan;
}

std::string scan_to_csv(const StabilityScan& scan) {
  std::ostringstream os;
  os << "c,S_c,qhat_full\n";
  char buf[64];
  for (std::size_t l = 0; l < scan.c_grid.size(); ++l) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", scan.c_grid[l], scan.S_curve[l]);
    os << buf << scan.q_by_c[l] << "\n";
  }
  return os.str();
}

std::string scan_summary_json(const StabilityScan& scan) {
  nlohmann::json doc;
  doc["selected_c"] = scan.selected_c;
  doc["selected_q"] = scan.selected_q;
  doc["manual"] = scan.manual;
  doc["q_max"] = scan.q_max;
  doc["permutation_seed"] = scan.permutation_seed;
  doc["n_subsamples"] = scan.n_subsamples;
  doc["base_penalties"] = scan.base_penalties;
  nlohmann::json ivs = nlohmann::json::array();
  for (std::size_t i = 0; i < scan.intervals.size(); ++i) {
    const auto& iv = scan.intervals[i];
    ivs.push_back({{"c_lo", iv.c_lo}, {"c_hi", iv.c_hi}, {"q", iv.q}, {"points", iv.last - iv.first + 1},
                   {"selected", scan.selected_interval && *scan.selected_interval == i}});
  }
  doc["intervals"] = std::move(ivs);
  return doc.dump(2);
}

} // namespace gstfm
