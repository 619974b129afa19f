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

#include "gstfm/core/lattice_field.hpp"

#include <cmath>
#include <sstream>

#include "gstfm/util/error.hpp"

namespace gstfm {

std::string to_string(const LatticeDims& dims) {
  std::ostringstream os;
  os << "(" << dims.s1 << "," << dims.s2 << "," << dims.t << ")";
  return os.str();
}

LatticeField::LatticeField(int n, LatticeDims dims, std::vector<double> values)
    : n_(n), dims_(dims), values_(std::move(values)) {
  if (n <= 0 || dims.s1 <= 0 || dims.s2 <= 0 || dims.t <= 0)
    throw DataError("field shape must be positive, got n=" + std::to_string(n) + " dims=" + to_string(dims));
  const std::size_t expected = static_cast<std::size_t>(n) * dims.points();
  if (values_.size() != expected)
    throw DataError("field payload length mismatch: expected " + std::to_string(expected) + " values, got " +
                    std::to_string(values_.size()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::size_t r = i;
      const int t = static_cast<int>(r % dims.t);
      r /= dims.t;
      const int s2 = static_cast<int>(r % dims.s2);
      r /= dims.s2;
      const int s1 = static_cast<int>(r % dims.s1);
      const int ell = static_cast<int>(r / dims.s1);
      std::ostringstream os;
      os << "non-finite value at (ell,s1,s2,t)=(" << ell + 1 << "," << s1 + 1 << "," << s2 + 1 << "," << t + 1
         << ")";
      throw DataError(os.str());
    }
  }
}

LatticeField LatticeField::zeros(int n, LatticeDims dims) {
  return LatticeField(n, dims, std::vector<double>(static_cast<std::size_t>(n) * dims.points(), 0.0));
}

LatticeField LatticeField::from_demeaned(int n, LatticeDims dims, std::vector<double> values,
                                         std::vector<double> series_means) {
  LatticeField out(n, dims, std::move(values));
  if (series_means.size() != static_cast<std::size_t>(n))
    throw DataError("series_means length must equal n");
  const std::size_t P = out.points();
  for (int ell = 0; ell < n; ++ell) {
    auto s = out.series(ell);
    double sum = 0.0, sq = 0.0;
    for (double v : s) sum += v;
    const double mean = sum / static_cast<double>(P);
    for (double v : s) sq += (v - mean) * (v - mean);
    const double sd = std::sqrt(sq / static_cast<double>(P));
    if (std::abs(mean) > 1e-12 * sd && std::abs(mean) > 1e-300)
      throw DataError("series " + std::to_string(ell + 1) + " is not centred");
  }
  out.demeaned_ = true;
  out.series_means_ = std::move(series_means);
  return out;
}

LatticeField demean(const LatticeField& field) {
  if (field.demeaned()) throw ConfigError("field is already demeaned");
  const std::size_t P = field.points();
  std::vector<double> values(field.values().begin(), field.values().end());
  std::vector<double> means(field.n(), 0.0);
  for (int ell = 0; ell < field.n(); ++ell) {
    double* x = values.data() + static_cast<std::size_t>(ell) * P;
    // Two passes: the second removes the rounding residue of the first.
    double sum = 0.0;
    for (std::size_t i = 0; i < P; ++i) sum += x[i];
    double mean = sum / static_cast<double>(P);
    double residual = 0.0;
    for (std::size_t i = 0; i < P; ++i) residual += x[i] - mean;
    mean += residual / static_cast<double>(P);
    for (std::size_t i = 0; i < P; ++i) x[i] -= mean;
    means[ell] = mean;
  }
  LatticeField out(field.n(), field.dims(), std::move(values));
  out.demeaned_ = true;
  out.series_means_ = std::move(means);
  return out;
}

LatticeField ensure_demeaned(const LatticeField& field) {
  return field.demeaned() ? field : demean(field);
}

LatticeField select_series(const LatticeField& field, std::span<const int> order) {
  if (order.empty()) throw ConfigError("series selection is empty");
  const std::size_t P = field.points();
  std::vector<double> values;
  values.reserve(order.size() * P);
  for (int ell : order) {
    if (ell < 0 || ell >= field.n())
      throw ConfigError("series index " + std::to_string(ell + 1) + " out of range 1.." + std::to_string(field.n()));
    auto s = field.series(ell);
    values.insert(values.end(), s.begin(), s.end());
  }
  if (field.demeaned()) {
    std::vector<double> means;
    for (int ell : order) means.push_back(field.series_means()[ell]);
    return LatticeField::from_demeaned(static_cast<int>(order.size()), field.dims(), std::move(values),
                                       std::move(means));
  }
  return LatticeField(static_cast<int>(order.size()), field.dims(), std::move(values));
}

LatticeField subfield(const LatticeField& field, int m) {
  if (m < 1 || m > field.n())
    throw ConfigError("subfield size m=" + std::to_string(m) + " out of range 1.." + std::to_string(field.n()));
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  return select_series(field, order);
}

StackedSeries stack_to_time_series(const LatticeField& field, StackOrder order) {
  const LatticeDims d = field.dims();
  StackedSeries out;
  out.n = field.n();
  out.source_dims = d;
  out.order = order;
  out.N = field.n() * d.s1 * d.s2;
  out.T = d.t;
  out.values.resize(static_cast<std::size_t>(out.N) * d.t);
  out.index_map.reserve(out.N);
  auto push = [&](int ell, int s1, int s2) {
    const std::size_t i = out.index_map.size();
    out.index_map.push_back({ell, s1, s2});
    const double* src = field.values().data() + field.index(ell, s1, s2, 0);
    std::copy(src, src + d.t, out.values.begin() + static_cast<std::ptrdiff_t>(i * d.t));
  };
  if (order == StackOrder::ell_major) {
    for (int ell = 0; ell < field.n(); ++ell)
      for (int s1 = 0; s1 < d.s1; ++s1)
        for (int s2 = 0; s2 < d.s2; ++s2) push(ell, s1, s2);
  } else {
    for (int s1 = 0; s1 < d.s1; ++s1)
      for (int s2 = 0; s2 < d.s2; ++s2)
        for (int ell = 0; ell < field.n(); ++ell) push(ell, s1, s2);
  }
  return out;
}

LatticeField StackedSeries::as_field() const { return LatticeField(N, LatticeDims{1, 1, T}, values); }

LatticeField StackedSeries::unstack(const LatticeField& stacked) const {
  if (stacked.n() != N || stacked.dims() != LatticeDims{1, 1, T})
    throw ConfigError("unstack: field shape does not match the stacked layout");
  std::vector<double> values(static_cast<std::size_t>(n) * source_dims.points());
  const std::size_t T_ = static_cast<std::size_t>(T);
  for (int i = 0; i < N; ++i) {
    const auto [ell, s1, s2] = index_map[i];
    const std::size_t dst = ((static_cast<std::size_t>(ell) * source_dims.s1 + s1) * source_dims.s2 + s2) * T_;
    auto src = stacked.series(i);
    std::copy(src.begin(), src.end(), values.begin() + static_cast<std::ptrdiff_t>(dst));
  }
  return LatticeField(n, source_dims, std::move(values));
}

} // namespace gstfm
