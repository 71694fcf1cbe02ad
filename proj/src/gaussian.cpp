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

#include "cvloop/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

namespace cvloop {

namespace {

constexpr double kUnboundedCouplingTol = 1e-9;
constexpr double kDegenerateVarianceTol = 1e-12;

// Spread used when sampling an outcome whose true marginal variance is
// unbounded. Any value gives the same conditional output (the limit formulas
// do not depend on it); this only shapes the recorded outcome.
constexpr double kUnboundedSamplingVar = 100.0;

Eigen::VectorXd drop_indices(const Eigen::VectorXd& v, int i0, int i1) {
  Eigen::VectorXd out(v.size() - 2);
  int w = 0;
  for (int i = 0; i < v.size(); ++i) {
    if (i == i0 || i == i1) continue;
    out(w++) = v(i);
  }
  return out;
}

Eigen::MatrixXd drop_rows(const Eigen::MatrixXd& m, int i0, int i1) {
  Eigen::MatrixXd out(m.rows() - 2, m.cols());
  int w = 0;
  for (int i = 0; i < m.rows(); ++i) {
    if (i == i0 || i == i1) continue;
    out.row(w++) = m.row(i);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd symplectic_form(int n_modes) {
  const int n = n_modes;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return omega;
}

void GaussianState::append(const GaussianState& other) {
  const int na = n_modes, nb = other.n_modes;
  const int n = na + nb;
  Eigen::VectorXd new_mean = Eigen::VectorXd::Zero(2 * n);
  new_mean.segment(0, na) = mean.segment(0, na);
  new_mean.segment(na, nb) = other.mean.segment(0, nb);
  new_mean.segment(n, na) = mean.segment(na, na);
  new_mean.segment(n + na, nb) = other.mean.segment(nb, nb);

  // Index map old -> new for both states, respecting xxpp ordering.
  auto map_a = [&](int i) { return i < na ? i : n + (i - na); };
  auto map_b = [&](int i) { return i < nb ? na + i : n + na + (i - nb); };

  Eigen::MatrixXd new_cov = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < 2 * na; ++i)
    for (int j = 0; j < 2 * na; ++j) new_cov(map_a(i), map_a(j)) = cov(i, j);
  for (int i = 0; i < 2 * nb; ++i)
    for (int j = 0; j < 2 * nb; ++j)
      new_cov(map_b(i), map_b(j)) = other.cov(i, j);

  const int ka = static_cast<int>(unbounded.cols());
  const int kb = static_cast<int>(other.unbounded.cols());
  Eigen::MatrixXd new_unbounded = Eigen::MatrixXd::Zero(2 * n, ka + kb);
  for (int i = 0; i < 2 * na; ++i)
    new_unbounded.row(map_a(i)).segment(0, ka) = unbounded.row(i);
  for (int i = 0; i < 2 * nb; ++i)
    new_unbounded.row(map_b(i)).segment(ka, kb) = other.unbounded.row(i);

  n_modes = n;
  mean = std::move(new_mean);
  cov = std::move(new_cov);
  unbounded = std::move(new_unbounded);
}

void GaussianState::remove_mode(int mode) {
  if (mode < 0 || mode >= n_modes) throw std::invalid_argument("mode out of range");
  const int ix = x_index(mode), ip = p_index(mode);
  mean = drop_indices(mean, ix, ip);
  cov = drop_rows(drop_rows(cov, ix, ip).transpose(), ix, ip).transpose();
  if (unbounded.cols() > 0) unbounded = drop_rows(unbounded, ix, ip);
  else unbounded.resize(2 * (n_modes - 1), 0);
  n_modes -= 1;
}

double GaussianState::symmetry_error() const {
  return (cov - cov.transpose()).cwiseAbs().maxCoeff();
}

double GaussianState::physicality_margin() const {
  Eigen::MatrixXcd m = cov.cast<std::complex<double>>();
  m += std::complex<double>(0, 0.5) * symplectic_form(n_modes).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  return solver.eigenvalues().minCoeff();
}

bool GaussianState::is_physical(double tol) const {
  if (has_unbounded()) return true;  // ideal limit, check suspended
  return physicality_margin() >= -tol;
}

void NoiseConfig::check() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(eta_in) || !in_unit(eta_out) || !in_unit(detector_efficiency))
    throw std::invalid_argument("transmissions must lie in (0, 1]");
  if (ancilla_squeezing_db && *ancilla_squeezing_db < 0.0)
    throw std::invalid_argument("ancilla squeezing must be nonnegative dB");
}

double symplectic_error(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows()) / 2;
  Eigen::MatrixXd omega = symplectic_form(n);
  return (m * omega * m.transpose() - omega).norm();
}

double SymplecticOp::symplectic_error() const { return cvloop::symplectic_error(matrix); }

SymplecticOp SymplecticOp::identity(int n_modes) {
  return {Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes),
          Eigen::VectorXd::Zero(2 * n_modes)};
}

GaussianState vacuum(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("mode count must be positive");
  GaussianState s;
  s.n_modes = n_modes;
  s.mean = Eigen::VectorXd::Zero(2 * n_modes);
  s.cov = 0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  s.unbounded.resize(2 * n_modes, 0);
  return s;
}

GaussianState squeezed_vacuum(double r) {
  GaussianState s = vacuum(1);
  s.cov(0, 0) = 0.5 * std::exp(-2.0 * r);
  s.cov(1, 1) = 0.5 * std::exp(2.0 * r);
  return s;
}

double squeezing_db_to_r(double db) { return db * std::log(10.0) / 20.0; }

double variance_to_db(double variance_x) {
  return -10.0 * std::log10(2.0 * variance_x);
}

GaussianState squeezed_vacuum_db(double db) {
  return squeezed_vacuum(squeezing_db_to_r(db));
}

GaussianState ideal_x_squeezed() {
  GaussianState s = vacuum(1);
  s.cov.setZero();
  s.unbounded = Eigen::MatrixXd::Zero(2, 1);
  s.unbounded(1, 0) = 1.0;  // p direction carries the unbounded variance
  return s;
}

SymplecticOp make_rotation(int n_modes, int mode, double theta) {
  if (mode < 0 || mode >= n_modes) throw std::invalid_argument("mode out of range");
  SymplecticOp op = SymplecticOp::identity(n_modes);
  const int ix = mode, ip = n_modes + mode;
  const double c = std::cos(theta), s = std::sin(theta);
  op.matrix(ix, ix) = c;
  op.matrix(ix, ip) = -s;
  op.matrix(ip, ix) = s;
  op.matrix(ip, ip) = c;
  return op;
}

SymplecticOp make_squeeze(int n_modes, int mode, double r) {
  if (mode < 0 || mode >= n_modes) throw std::invalid_argument("mode out of range");
  SymplecticOp op = SymplecticOp::identity(n_modes);
  op.matrix(mode, mode) = std::exp(-r);
  op.matrix(n_modes + mode, n_modes + mode) = std::exp(r);
  return op;
}

SymplecticOp make_beamsplitter(int n_modes, int outer, int loop, double transmissivity) {
  if (outer == loop || outer < 0 || loop < 0 || outer >= n_modes || loop >= n_modes)
    throw std::invalid_argument("beam splitter needs two distinct in-range modes");
  if (transmissivity < 0.0 || transmissivity > 1.0)
    throw std::invalid_argument("transmissivity must lie in [0, 1]");
  const double st = std::sqrt(transmissivity);
  const double sr = std::sqrt(1.0 - transmissivity);
  SymplecticOp op = SymplecticOp::identity(n_modes);
  for (int block = 0; block < 2; ++block) {
    const int o = block * n_modes + outer;
    const int l = block * n_modes + loop;
    op.matrix(o, o) = -sr;
    op.matrix(o, l) = st;
    op.matrix(l, o) = st;
    op.matrix(l, l) = sr;
  }
  return op;
}

SymplecticOp make_displacement(int n_modes, const Eigen::VectorXd& d) {
  if (d.size() != 2 * n_modes) throw std::invalid_argument("displacement length mismatch");
  SymplecticOp op = SymplecticOp::identity(n_modes);
  op.displacement = d;
  return op;
}

SymplecticOp compose(const SymplecticOp& second, const SymplecticOp& first) {
  if (second.matrix.rows() != first.matrix.rows())
    throw std::invalid_argument("dimension mismatch");
  return {second.matrix * first.matrix,
          second.matrix * first.displacement + second.displacement};
}

GaussianState apply(const GaussianState& state, const SymplecticOp& op) {
  if (op.matrix.rows() != 2 * state.n_modes)
    throw std::invalid_argument("operator dimension does not match state");
  GaussianState out = state;
  out.mean = op.matrix * state.mean + op.displacement;
  out.cov = op.matrix * state.cov * op.matrix.transpose();
  if (state.has_unbounded()) out.unbounded = op.matrix * state.unbounded;
  return out;
}

namespace {

HomodyneResult homodyne_impl(const GaussianState& state, int mode, double angle,
                             Rng* rng, const double* fixed) {
  if (mode < 0 || mode >= state.n_modes)
    throw std::invalid_argument("mode out of range");

  // Rotate the mode by -angle so the measured quadrature becomes its x.
  GaussianState s = (angle == 0.0)
                        ? state
                        : apply(state, make_rotation(state.n_modes, mode, -angle));
  const int ix = s.x_index(mode);
  const double mean_m = s.mean(ix);
  const Eigen::VectorXd u = s.cov.col(ix);
  const double var_m = s.cov(ix, ix);

  Eigen::VectorXd coupling;  // projections of the unbounded directions
  double coupling_norm = 0.0;
  if (s.has_unbounded()) {
    coupling = s.unbounded.row(ix).transpose();
    coupling_norm = coupling.norm();
  }

  HomodyneResult result;
  if (coupling_norm > kUnboundedCouplingTol) {
    // The measured quadrature has unbounded variance. Conditioning in the
    // lambda -> inf limit of cov + lambda D D^T:
    //   mean' = mean + d (q - mean_m) / a
    //   cov'  = cov + (s/a^2) d d^T - (d u^T + u d^T) / a
    // with d = D a_hat, a = |D^T pi|, u = cov pi, s = pi^T cov pi. The
    // direction d leaves the unbounded set; directions orthogonal to the
    // measurement survive.
    const Eigen::VectorXd a_hat = coupling / coupling_norm;
    const Eigen::VectorXd d = s.unbounded * a_hat;
    const double q = fixed ? *fixed
                           : rng->gauss(mean_m, var_m + kUnboundedSamplingVar);
    result.outcome = q;
    s.mean += d * ((q - mean_m) / coupling_norm);
    s.cov += (var_m / (coupling_norm * coupling_norm)) * (d * d.transpose());
    s.cov -= (d * u.transpose() + u * d.transpose()) / coupling_norm;
    // Remaining unbounded directions: D restricted to the complement of a_hat.
    const int k = static_cast<int>(s.unbounded.cols());
    if (k > 1) {
      Eigen::MatrixXd q_basis =
          Eigen::HouseholderQR<Eigen::MatrixXd>(a_hat).householderQ();
      s.unbounded = s.unbounded * q_basis.rightCols(k - 1);
    } else {
      s.unbounded.resize(2 * s.n_modes, 0);
    }
  } else {
    if (var_m < kDegenerateVarianceTol)
      throw DegenerateHomodyneError(
          "homodyne of a zero-variance quadrature (ideal ancilla on the measured port)");
    const double q = fixed ? *fixed : rng->gauss(mean_m, var_m);
    result.outcome = q;
    s.mean += u * ((q - mean_m) / var_m);
    s.cov -= (u * u.transpose()) / var_m;
  }

  s.remove_mode(mode);
  result.state = std::move(s);
  return result;
}

}  // namespace

HomodyneResult homodyne(const GaussianState& state, int mode, double angle, Rng& rng) {
  return homodyne_impl(state, mode, angle, &rng, nullptr);
}

HomodyneResult homodyne_fixed(const GaussianState& state, int mode, double angle,
                              double outcome) {
  return homodyne_impl(state, mode, angle, nullptr, &outcome);
}

GaussianState feedforward_displace(const GaussianState& state, int mode,
                                   double angle, double amount) {
  if (mode < 0 || mode >= state.n_modes)
    throw std::invalid_argument("mode out of range");
  GaussianState out = state;
  out.mean(out.x_index(mode)) += amount * std::cos(angle);
  out.mean(out.p_index(mode)) += amount * std::sin(angle);
  return out;
}

namespace {

GaussianState mis_impl(const GaussianState& state, int in_mode, double reflectivity,
                       const GaussianState& ancilla, Rng* rng, const double* fixed) {
  if (reflectivity <= 0.0 || reflectivity >= 1.0)
    throw std::invalid_argument("reflectivity must lie in (0, 1)");
  if (in_mode < 0 || in_mode >= state.n_modes)
    throw std::invalid_argument("mode out of range");
  if (ancilla.n_modes != 1) throw std::invalid_argument("ancilla must be one mode");

  const double transmissivity = 1.0 - reflectivity;
  const double gain = std::sqrt(transmissivity / reflectivity);

  GaussianState joint = state;
  joint.append(ancilla);
  const int anc = joint.n_modes - 1;
  joint = apply(joint, make_beamsplitter(joint.n_modes, anc, in_mode, transmissivity));
  HomodyneResult hom = fixed ? homodyne_fixed(joint, anc, M_PI / 2.0, *fixed)
                             : homodyne(joint, anc, M_PI / 2.0, *rng);
  return feedforward_displace(hom.state, in_mode, M_PI / 2.0, gain * hom.outcome);
}

}  // namespace

GaussianState measurement_induced_squeeze(const GaussianState& state, int in_mode,
                                          double reflectivity,
                                          const GaussianState& ancilla, Rng& rng) {
  return mis_impl(state, in_mode, reflectivity, ancilla, &rng, nullptr);
}

GaussianState measurement_induced_squeeze_fixed(const GaussianState& state,
                                                int in_mode, double reflectivity,
                                                const GaussianState& ancilla,
                                                double outcome) {
  return mis_impl(state, in_mode, reflectivity, ancilla, nullptr, &outcome);
}

GaussianState loss_channel(const GaussianState& state, int mode, double eta) {
  if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in (0, 1]");
  if (mode < 0 || mode >= state.n_modes)
    throw std::invalid_argument("mode out of range");
  GaussianState out = state;
  const int ix = out.x_index(mode), ip = out.p_index(mode);
  const double root = std::sqrt(eta);
  out.mean(ix) *= root;
  out.mean(ip) *= root;
  out.cov.row(ix) *= root;
  out.cov.col(ix) *= root;
  out.cov.row(ip) *= root;
  out.cov.col(ip) *= root;
  out.cov(ix, ix) += (1.0 - eta) * 0.5;
  out.cov(ip, ip) += (1.0 - eta) * 0.5;
  if (out.has_unbounded()) {
    out.unbounded.row(ix) *= root;
    out.unbounded.row(ip) *= root;
  }
  return out;
}

StateDistance state_distance(const GaussianState& a, const GaussianState& b) {
  if (a.n_modes != b.n_modes) throw std::invalid_argument("mode count mismatch");
  return {(a.mean - b.mean).norm(), (a.cov - b.cov).norm()};
}

double purity_det(const GaussianState& state) {
  return (2.0 * state.cov).determinant();
}

GaussianState extract_modes(const GaussianState& state, const std::vector<int>& modes) {
  const int n = static_cast<int>(modes.size());
  std::vector<int> rows(2 * n);
  for (int k = 0; k < n; ++k) {
    if (modes[k] < 0 || modes[k] >= state.n_modes)
      throw std::invalid_argument("mode out of range");
    rows[k] = state.x_index(modes[k]);
    rows[n + k] = state.p_index(modes[k]);
  }
  GaussianState out;
  out.n_modes = n;
  out.mean.resize(2 * n);
  out.cov.resize(2 * n, 2 * n);
  out.unbounded.resize(2 * n, state.unbounded.cols());
  for (int i = 0; i < 2 * n; ++i) {
    out.mean(i) = state.mean(rows[i]);
    for (int j = 0; j < 2 * n; ++j) out.cov(i, j) = state.cov(rows[i], rows[j]);
    if (state.has_unbounded()) out.unbounded.row(i) = state.unbounded.row(rows[i]);
  }
  // Directions with no support on the kept modes are irrelevant noise.
  if (out.unbounded.cols() > 0) {
    std::vector<int> keep;
    for (int c = 0; c < out.unbounded.cols(); ++c)
      if (out.unbounded.col(c).norm() > 1e-12) keep.push_back(c);
    Eigen::MatrixXd trimmed(2 * n, keep.size());
    for (size_t c = 0; c < keep.size(); ++c) trimmed.col(c) = out.unbounded.col(keep[c]);
    out.unbounded = std::move(trimmed);
  }
  return out;
}

}  // namespace cvloop
