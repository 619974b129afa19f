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

#include "gstfm/dynpca/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "gstfm/util/error.hpp"
#include "gstfm/util/parallel.hpp"

namespace gstfm {
namespace {

using cd = std::complex<double>;

[[noreturn]] void fail_at(const FrequencyGrid& grid, std::size_t g) {
  const auto h = grid.box().offsets(g);
  throw NumericError("eigendecomposition failed at grid index " + std::to_string(g) + " (h=" +
                     std::to_string(h[0]) + "," + std::to_string(h[1]) + "," + std::to_string(h[2]) + ")");
}

void fix_phase(Eigen::MatrixXcd& rows) {
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    Eigen::Index arg = 0;
    rows.row(j).cwiseAbs2().maxCoeff(&arg);
    const cd pivot = rows(j, arg);
    const double mod = std::abs(pivot);
    if (mod == 0.0) continue;
    rows.row(j) *= std::conj(pivot) / mod;
    rows(j, arg) = cd(std::abs(rows(j, arg)), 0.0);
  }
}

// Eigenpairs of a Hermitian matrix, descending; rows are v_j^H.
void decompose(const Eigen::MatrixXcd& m, bool real, int q_keep, Eigen::VectorXd& values, Eigen::MatrixXcd& rows,
               bool& ok) {
  if (real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), q_keep > 0 ? Eigen::ComputeEigenvectors
                                                                           : Eigen::EigenvaluesOnly);
    ok = es.info() == Eigen::Success;
    if (!ok) return;
    values = es.eigenvalues().reverse();
    if (q_keep > 0)
      rows = es.eigenvectors().rowwise().reverse().leftCols(q_keep).transpose().cast<cd>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, q_keep > 0 ? Eigen::ComputeEigenvectors
                                                                     : Eigen::EigenvaluesOnly);
    ok = es.info() == Eigen::Success;
    if (!ok) return;
    values = es.eigenvalues().reverse();
    if (q_keep > 0) rows = es.eigenvectors().rowwise().reverse().leftCols(q_keep).adjoint();
  }
  if (q_keep > 0) fix_phase(rows);
}

void mirror_fill(DynamicEigenSystem& sys) {
  const std::size_t c = sys.grid.center();
  for (std::size_t g = c + 1; g < sys.grid.size(); ++g) {
    const std::size_t m = sys.grid.mirror(g);
    sys.eigenvalues[m] = sys.eigenvalues[g];
    if (sys.q_keep > 0) sys.eigenvectors[m] = sys.eigenvectors[g].conjugate();
  }
}

} // namespace

DynamicEigenSystem eigendecompose_all(const SpectralDensityEstimate& spec, int q_keep, int threads) {
  const int n = spec.n();
  if (q_keep < 0 || q_keep > n)
    throw ConfigError("q_keep=" + std::to_string(q_keep) + " must lie in 0.." + std::to_string(n));
  DynamicEigenSystem sys;
  sys.grid = spec.grid;
  sys.q_keep = q_keep;
  sys.eigenvalues.resize(spec.grid.size());
  if (q_keep > 0) sys.eigenvectors.resize(spec.grid.size());
  const auto half = spec.grid.half();
  std::vector<char> ok(half.size(), 1);
  parallel_for(half.size(), threads, [&](std::size_t k) {
    const std::size_t g = half[k];
    Eigen::MatrixXcd rows;
    bool good = true;
    decompose(spec.matrices[g], g == spec.grid.center(), q_keep, sys.eigenvalues[g], rows, good);
    ok[k] = good;
    if (q_keep > 0) sys.eigenvectors[g] = std::move(rows);
  });
  for (std::size_t k = 0; k < half.size(); ++k)
    if (!ok[k]) fail_at(spec.grid, half[k]);
  mirror_fill(sys);
  return sys;
}

DynamicEigenSystem eigendecompose_all(const FactoredSpectrum& spec, int q_keep, int threads) {
  const int n = spec.n();
  const int r = spec.rank();
  if (q_keep < 0 || q_keep > r)
    throw ConfigError("q_keep=" + std::to_string(q_keep) + " must lie in 0.." + std::to_string(r) +
                      " for a factored estimate of rank " + std::to_string(r));
  DynamicEigenSystem sys;
  sys.grid = spec.grid;
  sys.q_keep = q_keep;
  sys.eigenvalues.resize(spec.grid.size());
  if (q_keep > 0) sys.eigenvectors.resize(spec.grid.size());
  const Eigen::MatrixXcd basis = spec.basis.cast<cd>();
  const auto half = spec.grid.half();
  std::vector<char> ok(half.size(), 1);
  parallel_for(half.size(), threads, [&](std::size_t k) {
    const std::size_t g = half[k];
    Eigen::VectorXd values;
    Eigen::MatrixXcd rows;
    bool good = true;
    decompose(spec.cores[g], g == spec.grid.center(), q_keep, values, rows, good);
    ok[k] = good;
    if (!good) return;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    full.head(r) = values;
    // Keep the ordering descending even if tiny negative eigenvalues exist.
    std::sort(full.data(), full.data() + n, std::greater<double>());
    sys.eigenvalues[g] = std::move(full);
    if (q_keep > 0) {
      // Core rows u^H map to full rows u^H Q^T.
      Eigen::MatrixXcd lifted = rows * basis.transpose();
      fix_phase(lifted);
      sys.eigenvectors[g] = std::move(lifted);
    }
  });
  for (std::size_t k = 0; k < half.size(); ++k)
    if (!ok[k]) fail_at(spec.grid, half[k]);
  mirror_fill(sys);
  return sys;
}

std::vector<Eigen::VectorXd> dynamic_eigenvalues(const SpectralDensityEstimate& spec, int threads) {
  return eigendecompose_all(spec, 0, threads).eigenvalues;
}

Eigen::VectorXd averaged_eigenvalues(const std::vector<Eigen::VectorXd>& eigenvalues, int top_k) {
  if (eigenvalues.empty()) throw ConfigError("no eigenvalues to average");
  const int n = static_cast<int>(eigenvalues.front().size());
  if (top_k < 0 || top_k > n)
    throw ConfigError("top_k=" + std::to_string(top_k) + " must lie in 0.." + std::to_string(n));
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(top_k);
  for (const auto& v : eigenvalues) avg += v.head(top_k);
  return avg / static_cast<double>(eigenvalues.size());
}

Eigen::VectorXd averaged_eigenvalues(const DynamicEigenSystem& sys, int top_k) {
  return averaged_eigenvalues(sys.eigenvalues, top_k);
}

Eigen::MatrixXd eigengap_curve(const LatticeField& field, std::span<const int> m_values, int top_k,
                               const KernelTriple& kernels, const BandwidthTriple& bw, GridConvention convention,
                               int threads) {
  if (m_values.empty()) throw ConfigError("eigengap_curve needs at least one m");
  for (int m : m_values)
    if (m < 1 || m > field.n())
      throw ConfigError("m=" + std::to_string(m) + " out of range 1.." + std::to_string(field.n()));
  const LatticeField x = ensure_demeaned(field);
  const SpectralDensityEstimate full = estimate_spectral_density(x, kernels, bw, convention, threads);
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m_values.size()), top_k,
                                                  std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < m_values.size(); ++r) {
    const int m = m_values[r];
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    const auto eig = dynamic_eigenvalues(principal_submatrix(full, order), threads);
    const int k = std::min(top_k, m);
    out.row(static_cast<Eigen::Index>(r)).head(k) = averaged_eigenvalues(eig, k).transpose();
  }
  return out;
}

Eigen::MatrixXd stacked_eigengap_curve(const LatticeField& field, std::span<const int> m_values, int top_k,
                                       KernelSpec kernel, int temporal_bandwidth, GridConvention convention,
                                       int threads) {
  if (m_values.empty()) throw ConfigError("stacked_eigengap_curve needs at least one m");
  const LatticeField x = ensure_demeaned(field);
  const BandwidthTriple bw{{0, 0, temporal_bandwidth}};
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(m_values.size()), top_k,
                                                  std::numeric_limits<double>::quiet_NaN());
  for (std::size_t r = 0; r < m_values.size(); ++r) {
    const LatticeField stacked = stack_to_time_series(subfield(x, m_values[r])).as_field();
    const LatticeField centred = demean(stacked);
    Eigen::VectorXd avg;
    const int k = std::min(top_k, centred.n());
    if (centred.points() < static_cast<std::size_t>(centred.n()) && centred.points() <= kMaxFactoredPoints) {
      const auto spec = estimate_factored_spectrum(centred, same_kernel(kernel), bw, convention, threads);
      avg = averaged_eigenvalues(eigendecompose_all(spec, 0, threads), k);
    } else {
      const auto spec = estimate_spectral_density(centred, same_kernel(kernel), bw, convention, threads);
      avg = averaged_eigenvalues(dynamic_eigenvalues(spec, threads), k);
    }
    out.row(static_cast<Eigen::Index>(r)).head(k) = avg.transpose();
  }
  return out;
}

std::string eigengap_to_csv(std::span<const int> m_values, const Eigen::MatrixXd& curve) {
  std::ostringstream os;
  os << "m";
  for (Eigen::Index j = 0; j < curve.cols(); ++j) os << ",lambda_" << j + 1;
  os << "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < curve.rows(); ++r) {
    os << m_values[static_cast<std::size_t>(r)];
    for (Eigen::Index j = 0; j < curve.cols(); ++j) {
      if (std::isnan(curve(r, j))) {
        os << ",";
        continue;
      }
      std::snprintf(buf, sizeof buf, "%.17g", curve(r, j));
      os << "," << buf;
    }
    os << "\n";
  }
  return os.str();
}

} // namespace gstfm
