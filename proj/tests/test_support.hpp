// Copyright 2026 The cvloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Shared helpers for tests: random gate generators kept independent of the
// production decomposition/compilation paths, plus simple statistics.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cvloop/gaussian.hpp"
#include "cvloop/rng.hpp"

namespace cvloop_test {

// Haar-ish random unitary via QR of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(int n, cvloop::Rng& rng) {
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(rng.gauss(), rng.gauss());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    std::complex<double> d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Eigen::MatrixXd passive_from_unitary(const Eigen::MatrixXcd& u) {
  const int n = static_cast<int>(u.rows());
  Eigen::MatrixXd o(2 * n, 2 * n);
  o.topLeftCorner(n, n) = u.real();
  o.topRightCorner(n, n) = -u.imag();
  o.bottomLeftCorner(n, n) = u.imag();
  o.bottomRightCorner(n, n) = u.real();
  return o;
}

// Random symplectic built as passive * squeezers * passive, with squeezing
// parameters bounded by `max_r`.
inline Eigen::MatrixXd random_symplectic(int n, cvloop::Rng& rng, double max_r = 1.2) {
  Eigen::VectorXd d(2 * n);
  for (int k = 0; k < n; ++k) {
    const double r = max_r * rng.uniform();
    d(k) = std::exp(-r);
    d(n + k) = std::exp(r);
  }
  return passive_from_unitary(random_unitary(n, rng)) * d.asDiagonal() *
         passive_from_unitary(random_unitary(n, rng));
}

// Random physical Gaussian state: a random symplectic applied to vacuum plus
// optional random displacement.
inline cvloop::GaussianState random_state(int n, cvloop::Rng& rng, double max_r = 1.0) {
  cvloop::GaussianState s = cvloop::vacuum(n);
  cvloop::SymplecticOp op;
  op.matrix = random_symplectic(n, rng, max_r);
  op.displacement = Eigen::VectorXd::Zero(2 * n);
  for (int i = 0; i < 2 * n; ++i) op.displacement(i) = rng.gauss();
  return cvloop::apply(s, op);
}

// Independent conditional-update oracle: condition a Gaussian (mean, cov) on
// quadrature row `row` taking value `q` via the explicit Schur complement,
// then drop the listed rows. Used to cross-check homodyne without touching
// the production update path.
struct SchurResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

inline SchurResult schur_condition(const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& cov, int row, double q,
                                   const std::vector<int>& drop) {
  const Eigen::VectorXd column = cov.col(row);
  const double variance = cov(row, row);
  Eigen::VectorXd new_mean = mean + column * ((q - mean(row)) / variance);
  Eigen::MatrixXd new_cov = cov - (column * column.transpose()) / variance;
  std::vector<int> keep;
  for (int i = 0; i < mean.size(); ++i)
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) keep.push_back(i);
  SchurResult out;
  out.mean.resize(keep.size());
  out.cov.resize(keep.size(), keep.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    out.mean(i) = new_mean(keep[i]);
    for (size_t j = 0; j < keep.size(); ++j) out.cov(i, j) = new_cov(keep[i], keep[j]);
  }
  return out;
}

// One-sample Kolmogorov-Smirnov statistic against a normal CDF.
inline double ks_statistic_normal(std::vector<double> samples, double mean,
                                  double variance) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double z = (samples[i] - mean) / std::sqrt(2.0 * variance);
    const double cdf = 0.5 * std::erfc(-z);
    worst = std::max(worst, std::abs((i + 1) / n - cdf));
    worst = std::max(worst, std::abs(cdf - i / n));
  }
  return worst;
}

// Critical value of the one-sample KS test at significance alpha (asymptotic).
inline double ks_critical(double alpha, size_t n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace cvloop_test
