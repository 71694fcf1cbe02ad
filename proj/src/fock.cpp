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

#include "cvloop/fock.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace cvloop {
namespace fock {

namespace {

using Complex = std::complex<double>;

int64_t ipow(int64_t base, int exp) {
  int64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

Eigen::MatrixXcd lowering(int cutoff) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// exp(-i H) for hermitian H.
Eigen::MatrixXcd unitary_from_hermitian(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  Eigen::VectorXcd phases(h.rows());
  for (int i = 0; i < h.rows(); ++i)
    phases(i) = std::polar(1.0, -eig.eigenvalues()(i));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

// Applies an arbitrary single-mode matrix; returns norm-squared lost if the
// matrix is not unitary on the truncated space (none of ours are lossy).
void apply_single_mode(FockState& state, int mode, const Eigen::MatrixXcd& u) {
  const int n = state.cutoff;
  const int64_t s = ipow(n, mode);
  const int64_t total = state.amps.size();
  Eigen::VectorXcd v(n), w(n);
  for (int64_t high = 0; high < total / (s * n); ++high) {
    for (int64_t low = 0; low < s; ++low) {
      const int64_t base = high * s * n + low;
      for (int k = 0; k < n; ++k) v(k) = state.amps(base + k * s);
      w.noalias() = u * v;
      for (int k = 0; k < n; ++k) state.amps(base + k * s) = w(k);
    }
  }
}

// Beam splitter blocks exp(theta (a^dag b - a b^dag)) restricted to fixed
// total photon number s; dimension s+1. Real orthogonal, stored complex so
// the hot path multiplies without casting.
using BlockSet = std::vector<Eigen::MatrixXcd>;

std::shared_ptr<const BlockSet> beamsplitter_blocks(int cutoff, double theta) {
  static std::mutex mutex;
  static std::map<std::pair<int, int64_t>, std::shared_ptr<const BlockSet>> cache;
  int64_t key_bits;
  static_assert(sizeof(key_bits) == sizeof(theta));
  std::memcpy(&key_bits, &theta, sizeof(theta));
  const std::pair<int, int64_t> key{cutoff, key_bits};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  auto blocks = std::make_shared<BlockSet>();
  blocks->reserve(2 * cutoff - 1);
  for (int s = 0; s <= 2 * (cutoff - 1); ++s) {
    const int dim = s + 1;
    // The generator is tridiagonal antisymmetric; conjugating by diag(i^j)
    // turns i*K into a real symmetric tridiagonal matrix.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j + 1 < dim; ++j) {
      const double c = theta * std::sqrt(static_cast<double>(j + 1) * (s - j));
      t(j + 1, j) = c;
      t(j, j + 1) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    Eigen::MatrixXcd core = Eigen::MatrixXcd::Zero(dim, dim);
    {
      Eigen::VectorXcd phases(dim);
      for (int i = 0; i < dim; ++i) phases(i) = std::polar(1.0, -eig.eigenvalues()(i));
      core = eig.eigenvectors().cast<Complex>() * phases.asDiagonal() *
             eig.eigenvectors().transpose().cast<Complex>();
    }
    Eigen::VectorXcd d(dim);
    for (int j = 0; j < dim; ++j) d(j) = std::pow(Complex(0, 1), j);
    Eigen::MatrixXcd b = d.asDiagonal() * core * d.conjugate().asDiagonal();
    blocks->push_back(b.real().cast<Complex>());
  }

  std::lock_guard<std::mutex> lock(mutex);
  cache[key] = blocks;
  return blocks;
}

// Hermite functions psi_n(x) for n < cutoff (vacuum variance 1/2 convention).
Eigen::MatrixXd hermite_table(const Eigen::VectorXd& grid, int cutoff) {
  const int g = static_cast<int>(grid.size());
  Eigen::MatrixXd psi(g, cutoff);
  for (int i = 0; i < g; ++i) {
    const double x = grid(i);
    psi(i, 0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (cutoff > 1) psi(i, 1) = std::sqrt(2.0) * x * psi(i, 0);
    for (int n = 2; n < cutoff; ++n)
      psi(i, n) = std::sqrt(2.0 / n) * x * psi(i, n - 1) -
                  std::sqrt((n - 1.0) / n) * psi(i, n - 2);
  }
  return psi;
}

Eigen::VectorXd hermite_row(double x, int cutoff) {
  Eigen::VectorXd psi(cutoff);
  psi(0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (cutoff > 1) psi(1) = std::sqrt(2.0) * x * psi(0);
  for (int n = 2; n < cutoff; ++n)
    psi(n) = std::sqrt(2.0 / n) * x * psi(n - 1) -
             std::sqrt((n - 1.0) / n) * psi(n - 2);
  return psi;
}

Eigen::MatrixXcd reduced_density(const FockState& state, int mode) {
  const int n = state.cutoff;
  const int64_t s = ipow(n, mode);
  const int64_t total = state.amps.size();
  const int64_t rest = total / n;
  // Gather into an n x rest matrix so the partial trace is one GEMM.
  Eigen::MatrixXcd m(n, rest);
  int64_t col = 0;
  for (int64_t high = 0; high < total / (s * n); ++high) {
    for (int64_t low = 0; low < s; ++low) {
      const int64_t base = high * s * n + low;
      for (int k = 0; k < n; ++k) m(k, col) = state.amps(base + k * s);
      ++col;
    }
  }
  return m * m.adjoint();
}

FockState rotate_for_measurement(const FockState& state, int mode, double angle) {
  FockState rotated = state;
  if (angle != 0.0) apply_rotation(rotated, mode, -angle);
  return rotated;
}

}  // namespace

void FockState::absorb_leakage(double lost, const char* what) {
  last_leakage = lost;
  total_leakage += lost;
  if (lost > leakage_bound)
    throw CutoffError(std::string(what) + " lost " + std::to_string(lost) +
                      " of the norm; increase the cutoff or the leakage bound");
  const double norm_now = amps.norm();
  if (norm_now <= 0.0) throw CutoffError("state vanished under truncation");
  amps /= norm_now;
}

const QuadratureOperators& QuadratureOperators::at(int cutoff) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureOperators>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(cutoff);
  if (it == cache.end()) {
    auto ops = std::make_unique<QuadratureOperators>();
    ops->cutoff = cutoff;
    const Eigen::MatrixXcd a = lowering(cutoff);
    ops->x = (a + a.adjoint()) / std::sqrt(2.0);
    ops->p = Complex(0, 1) * (a.adjoint() - a) / std::sqrt(2.0);
    it = cache.emplace(cutoff, std::move(ops)).first;
  }
  return *it->second;
}

FockState fock_vacuum(int cutoff, int n_modes) {
  if (cutoff < 2) throw std::invalid_argument("cutoff must be at least 2");
  FockState s;
  s.cutoff = cutoff;
  s.n_modes = n_modes;
  s.amps = Eigen::VectorXcd::Zero(ipow(cutoff, n_modes));
  s.amps(0) = 1.0;
  return s;
}

FockState coherent_state(double x0, double p0, int cutoff) {
  FockState s = fock_vacuum(cutoff);
  const Complex alpha(x0 / std::sqrt(2.0), p0 / std::sqrt(2.0));
  Complex term = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < cutoff; ++n) {
    s.amps(n) = term;
    term *= alpha / std::sqrt(n + 1.0);
  }
  const double mass = s.amps.squaredNorm();
  s.absorb_leakage(1.0 - mass, "coherent state preparation");
  return s;
}

FockState squeezed_state(double r, int cutoff, double leakage_bound) {
  FockState s = fock_vacuum(cutoff);
  s.leakage_bound = leakage_bound;
  if (r == 0.0) return s;
  // S(r)|0> = sech^{1/2} sum_m (-tanh r)^m sqrt((2m)!)/(2^m m!) |2m>.
  const double th = std::tanh(r);
  s.amps.setZero();
  double log_mag = 0.5 * std::log(1.0 / std::cosh(r));
  double sign = 1.0;
  for (int m = 0; 2 * m < cutoff; ++m) {
    if (m > 0) {
      // ratio of consecutive coefficients: -tanh r * sqrt((2m)(2m-1))/(2m)
      log_mag += std::log(std::abs(th)) +
                 0.5 * std::log((2.0 * m) * (2.0 * m - 1.0)) - std::log(2.0 * m);
      sign *= (th > 0.0 ? -1.0 : 1.0);
    }
    s.amps(2 * m) = sign * std::exp(log_mag);
  }
  const double mass = s.amps.squaredNorm();
  s.absorb_leakage(1.0 - mass, "squeezed state preparation");
  return s;
}

FockState tensor(const FockState& a, const FockState& b) {
  if (a.cutoff != b.cutoff) throw std::invalid_argument("cutoff mismatch");
  FockState out;
  out.cutoff = a.cutoff;
  out.n_modes = a.n_modes + b.n_modes;
  out.leakage_bound = std::max(a.leakage_bound, b.leakage_bound);
  out.total_leakage = a.total_leakage + b.total_leakage;
  out.amps.resize(a.amps.size() * b.amps.size());
  for (int64_t j = 0; j < b.amps.size(); ++j)
    out.amps.segment(j * a.amps.size(), a.amps.size()) = b.amps(j) * a.amps;
  return out;
}

namespace {

// Fock coefficients of envelope(x) e^{i gamma' x^3} by trapezoid quadrature.
// Projecting the exact wavefunction keeps the cubic phase faithful wherever
// the truncated basis can represent it; exponentiating the truncated x^3
// operator instead aliases the fast phase at large |x| and scrambles the
// state long before the envelope tail is reached.
struct CubicCoeffs {
  Eigen::VectorXcd amps;  // normalized
  double lost = 0.0;      // norm-squared outside the cutoff
};

const CubicCoeffs& cubic_coeffs(double gamma_prime, double r, int cutoff) {
  static std::mutex mutex;
  static std::map<std::tuple<int64_t, int64_t, int>, std::unique_ptr<CubicCoeffs>> cache;
  int64_t gbits, rbits;
  std::memcpy(&gbits, &gamma_prime, sizeof(gbits));
  std::memcpy(&rbits, &r, sizeof(rbits));
  const std::tuple<int64_t, int64_t, int> key{gbits, rbits, cutoff};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  const double variance = 0.5 * std::exp(2.0 * r);
  // The integrand is limited to where the basis functions live.
  const double extent = std::sqrt(2.0 * cutoff) + 6.0;
  const double max_freq =
      3.0 * std::abs(gamma_prime) * extent * extent + std::sqrt(2.0 * cutoff) + 1.0;
  const int points =
      std::max(4001, static_cast<int>(extent * std::max(max_freq, 4.0) * 8.0)) | 1;
  const double step = 2.0 * extent / (points - 1);
  const double env_norm = std::pow(2.0 * M_PI * variance, -0.25);

  auto coeffs = std::make_unique<CubicCoeffs>();
  coeffs->amps = Eigen::VectorXcd::Zero(cutoff);
  std::vector<double> psi(cutoff);
  for (int i = 0; i < points; ++i) {
    const double x = -extent + i * step;
    psi[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (cutoff > 1) psi[1] = std::sqrt(2.0) * x * psi[0];
    for (int n = 2; n < cutoff; ++n)
      psi[n] = std::sqrt(2.0 / n) * x * psi[n - 1] -
               std::sqrt((n - 1.0) / n) * psi[n - 2];
    const Complex weight = env_norm * std::exp(-x * x / (4.0 * variance)) *
                           std::polar(1.0, gamma_prime * x * x * x) *
                           ((i == 0 || i == points - 1) ? 0.5 : 1.0) * step;
    for (int n = 0; n < cutoff; ++n) coeffs->amps(n) += psi[n] * weight;
  }
  const double mass = coeffs->amps.squaredNorm();
  coeffs->lost = 1.0 - mass;
  coeffs->amps /= std::sqrt(mass);
  return *cache.emplace(key, std::move(coeffs)).first->second;
}

}  // namespace

FockState cubic_ancilla(double gamma_prime, double r, int cutoff,
                        double leakage_bound) {
  if (cutoff < 20) throw std::invalid_argument("cubic ancilla needs cutoff >= 20");
  if (r < 0.0) throw std::invalid_argument("envelope squeezing must be >= 0");
  const CubicCoeffs& coeffs = cubic_coeffs(gamma_prime, r, cutoff);
  FockState s = fock_vacuum(cutoff);
  s.leakage_bound = leakage_bound;
  s.amps = coeffs.amps;
  s.absorb_leakage(coeffs.lost, "cubic ancilla preparation");
  return s;
}

void apply_rotation(FockState& state, int mode, double theta) {
  const int n = state.cutoff;
  const int64_t s = ipow(n, mode);
  const int64_t total = state.amps.size();
  Eigen::VectorXcd phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, theta * k);
  for (int64_t idx = 0; idx < total; ++idx)
    state.amps(idx) *= phases((idx / s) % n);
}

void apply_squeeze(FockState& state, int mode, double r) {
  const int n = state.cutoff;
  const Eigen::MatrixXcd a = lowering(n);
  // S(r) = exp[r (a^2 - a^dag^2)/2] = exp(-i H), H = i r (a^2 - a^dag^2)/2.
  const Eigen::MatrixXcd h =
      Complex(0, 0.5 * r) * (a * a - (a * a).adjoint());
  apply_single_mode(state, mode, unitary_from_hermitian(h));
}

void apply_displacement(FockState& state, int mode, double dx, double dp) {
  if (dx == 0.0 && dp == 0.0) return;
  const QuadratureOperators& ops = QuadratureOperators::at(state.cutoff);
  // exp(i (dp x - dx p)) shifts x by dx and p by dp.
  const Eigen::MatrixXcd h = -(dp * ops.x - dx * ops.p);
  apply_single_mode(state, mode, unitary_from_hermitian(h));
}

void apply_cubic_phase(FockState& state, int mode, double gamma_prime) {
  const QuadratureOperators& ops = QuadratureOperators::at(state.cutoff);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(ops.x);
  Eigen::VectorXcd phases(state.cutoff);
  for (int i = 0; i < state.cutoff; ++i)
    phases(i) = std::polar(1.0, gamma_prime * std::pow(eig.eigenvalues()(i), 3));
  const Eigen::MatrixXcd u =
      eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  apply_single_mode(state, mode, u);
}

void apply_beamsplitter(FockState& state, int outer, int loop, double transmissivity) {
  if (outer == loop) throw std::invalid_argument("beam splitter needs two modes");
  if (transmissivity < 0.0 || transmissivity > 1.0)
    throw std::invalid_argument("transmissivity must lie in [0, 1]");
  const int n = state.cutoff;
  const double theta = std::atan2(std::sqrt(transmissivity),
                                  std::sqrt(1.0 - transmissivity));
  auto blocks = beamsplitter_blocks(n, theta);

  const int64_t s_outer = ipow(n, outer);
  const int64_t s_loop = ipow(n, loop);
  const int64_t total = state.amps.size();
  double leaked = 0.0;

  Eigen::MatrixXcd plane(n, n);
  for (int64_t rep = 0; rep < total; ++rep) {
    if ((rep / s_outer) % n != 0 || (rep / s_loop) % n != 0) continue;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        plane(a, b) = state.amps(rep + a * s_outer + b * s_loop);

    for (int s = 0; s <= 2 * (n - 1); ++s) {
      const int dim = s + 1;
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
      for (int j = std::max(0, s - (n - 1)); j <= std::min(s, n - 1); ++j)
        v(j) = plane(j, s - j) * (j % 2 == 0 ? 1.0 : -1.0);  // pi phase on outer
      Eigen::VectorXcd w = (*blocks)[s] * v;
      for (int j = 0; j < dim; ++j) {
        if (j <= n - 1 && s - j <= n - 1 && j >= std::max(0, s - (n - 1)))
          plane(j, s - j) = w(j);
        else
          leaked += std::norm(w(j));
      }
    }

    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        state.amps(rep + a * s_outer + b * s_loop) = plane(a, b);
  }
  state.absorb_leakage(leaked, "beam splitter");
}

Marginal quadrature_marginal(const FockState& state, int mode, double angle, int bins) {
  if (bins < 3) throw std::invalid_argument("need at least 3 grid points");
  const FockState rotated = rotate_for_measurement(state, mode, angle);
  const int n = state.cutoff;
  const Eigen::MatrixXcd rho = reduced_density(rotated, mode);
  const QuadratureOperators& ops = QuadratureOperators::at(n);

  Marginal m;
  m.mean = (rho * ops.x).trace().real();
  m.variance = (rho * ops.x * ops.x).trace().real() - m.mean * m.mean;
  const double sigma = std::max(std::sqrt(std::max(m.variance, 0.0)), 1e-6);

  m.grid.resize(bins);
  const double lo = m.mean - 6.5 * sigma, hi = m.mean + 6.5 * sigma;
  for (int i = 0; i < bins; ++i)
    m.grid(i) = lo + (hi - lo) * i / (bins - 1);

  const Eigen::MatrixXd psi = hermite_table(m.grid, n);
  const Eigen::MatrixXcd mp = psi * rho;  // bins x n
  m.pdf.resize(bins);
  for (int i = 0; i < bins; ++i) {
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k) acc += mp(i, k) * psi(i, k);
    m.pdf(i) = std::max(0.0, acc.real());
  }
  return m;
}

double Marginal::sample(Rng& rng) const {
  const int bins = static_cast<int>(grid.size());
  Eigen::VectorXd mass(bins - 1);
  for (int i = 0; i + 1 < bins; ++i)
    mass(i) = 0.5 * (pdf(i) + pdf(i + 1)) * (grid(i + 1) - grid(i));
  const double total = mass.sum();
  double u = rng.uniform() * total;
  for (int i = 0; i + 1 < bins; ++i) {
    if (u <= mass(i) || i == bins - 2) {
      const double dx = grid(i + 1) - grid(i);
      const double p0 = pdf(i), p1 = pdf(i + 1);
      if (mass(i) <= 0.0) return grid(i) + 0.5 * dx;
      // Invert the cumulative of the linear density within the bin:
      // p0 t + slope t^2 / 2 = u.
      const double slope = (p1 - p0) / dx;
      if (std::abs(slope) < 1e-30) return grid(i) + (u / mass(i)) * dx;
      const double disc = std::max(0.0, p0 * p0 + 2.0 * slope * u);
      const double root = (std::sqrt(disc) - p0) / slope;
      return grid(i) + std::clamp(root, 0.0, dx);
    }
    u -= mass(i);
  }
  return grid(bins - 1);
}

double Marginal::cdf_at(double x) const {
  const int bins = static_cast<int>(grid.size());
  if (x <= grid(0)) return 0.0;
  double acc = 0.0;
  for (int i = 0; i + 1 < bins; ++i) {
    const double dx = grid(i + 1) - grid(i);
    if (x >= grid(i + 1)) {
      acc += 0.5 * (pdf(i) + pdf(i + 1)) * dx;
      continue;
    }
    const double t = (x - grid(i)) / dx;
    const double ph = pdf(i) + (pdf(i + 1) - pdf(i)) * t;
    acc += 0.5 * (pdf(i) + ph) * (x - grid(i));
    break;
  }
  return acc;
}

namespace {

FockHomodyneResult project_onto(const FockState& state, int mode, double angle,
                                double outcome) {
  FockState rotated = rotate_for_measurement(state, mode, angle);
  const int n = rotated.cutoff;
  const int64_t s = ipow(n, mode);
  const int64_t total = rotated.amps.size();
  const Eigen::VectorXd psi = hermite_row(outcome, n);

  FockState out;
  out.cutoff = n;
  out.n_modes = rotated.n_modes - 1;
  out.leakage_bound = rotated.leakage_bound;
  out.total_leakage = rotated.total_leakage;
  out.amps.resize(total / n);
  for (int64_t high = 0; high < total / (s * n); ++high) {
    for (int64_t low = 0; low < s; ++low) {
      Complex acc = 0.0;
      const int64_t base = high * s * n + low;
      for (int k = 0; k < n; ++k) acc += psi(k) * rotated.amps(base + k * s);
      out.amps(high * s + low) = acc;
    }
  }
  const double norm = out.amps.norm();
  if (norm < 1e-50)
    throw std::runtime_error(
        "homodyne projection onto a negligible-probability outcome");
  out.amps /= norm;
  return {outcome, std::move(out)};
}

}  // namespace

FockHomodyneResult homodyne_fock(FockState state, int mode, double angle, Rng& rng,
                                 int bins) {
  const Marginal marginal = quadrature_marginal(state, mode, angle, bins);
  const double outcome = marginal.sample(rng);
  return project_onto(state, mode, angle, outcome);
}

FockHomodyneResult homodyne_fock_fixed(FockState state, int mode, double angle,
                                       double outcome, int bins) {
  (void)bins;
  return project_onto(state, mode, angle, outcome);
}

Moments mean_quadratures(const FockState& state, int mode) {
  const Eigen::MatrixXcd rho = reduced_density(state, mode);
  const QuadratureOperators& ops = QuadratureOperators::at(state.cutoff);
  Moments m;
  m.mean_x = (rho * ops.x).trace().real();
  m.mean_p = (rho * ops.p).trace().real();
  m.var_x = (rho * ops.x * ops.x).trace().real() - m.mean_x * m.mean_x;
  m.var_p = (rho * ops.p * ops.p).trace().real() - m.mean_p * m.mean_p;
  return m;
}

namespace {

CubicRunResult run_cubic_impl(const FockState& input, double gamma_prime,
                              double ancilla_r, Rng* rng, const double* fixed_q,
                              const double* fixed_y) {
  if (input.n_modes != 1) throw std::invalid_argument("cubic circuit takes one mode");
  const int n = input.cutoff;
  FockState anc1 = squeezed_state(ancilla_r, n, input.leakage_bound);
  FockState anc2 = cubic_ancilla(gamma_prime, ancilla_r, n, input.leakage_bound);
  FockState joint = tensor(tensor(input, anc1), anc2);

  apply_beamsplitter(joint, 1, 0, 0.5);
  apply_beamsplitter(joint, 2, 0, 0.5);

  FockHomodyneResult hd1 = fixed_q ? homodyne_fock_fixed(joint, 2, 0.0, *fixed_q)
                                   : homodyne_fock(joint, 2, 0.0, *rng);
  CubicRunResult result;
  result.q = hd1.outcome;
  result.phi = std::atan(3.0 * std::sqrt(2.0) * gamma_prime * result.q);

  apply_rotation(hd1.state, 0, result.phi);
  FockHomodyneResult hd2 = fixed_y
                               ? homodyne_fock_fixed(hd1.state, 0, M_PI / 2.0, *fixed_y)
                               : homodyne_fock(hd1.state, 0, M_PI / 2.0, *rng);
  result.y = hd2.outcome;

  if (std::abs(std::cos(result.phi)) < 1e-12)
    throw std::runtime_error("singular feedforward: cos(phi) vanished");
  apply_displacement(hd2.state, 0, 0.0,
                     std::sqrt(2.0) * result.y / std::cos(result.phi));
  result.output = std::move(hd2.state);
  return result;
}

}  // namespace

CubicRunResult run_cubic_circuit(const FockState& input, double gamma_prime,
                                 double ancilla_r, Rng& rng) {
  return run_cubic_impl(input, gamma_prime, ancilla_r, &rng, nullptr, nullptr);
}

CubicRunResult run_cubic_circuit_fixed(const FockState& input, double gamma_prime,
                                       double ancilla_r, double q, double y) {
  return run_cubic_impl(input, gamma_prime, ancilla_r, nullptr, &q, &y);
}

CubicPrediction cubic_gate_prediction(double gamma_prime, double mean_x, double mean_p,
                                      double var_x) {
  CubicPrediction p;
  p.mean_x = mean_x / std::sqrt(2.0);
  p.mean_p = std::sqrt(2.0) * mean_p +
             1.5 * gamma_prime * (var_x + mean_x * mean_x);
  return p;
}

}  // namespace fock
}  // namespace cvloop
