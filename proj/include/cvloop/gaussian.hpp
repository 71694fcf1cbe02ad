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

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cvloop/errors.hpp"
#include "cvloop/rng.hpp"

namespace cvloop {

// Quadrature convention used throughout: xxpp ordering (x_1..x_n, p_1..p_n),
// [x, p] = i, vacuum variance 1/2. The symplectic form is
// Omega = [[0, I], [-I, 0]].

Eigen::MatrixXd symplectic_form(int n_modes);

// Gaussian state of n modes: first and second moments, plus an optional set of
// directions carrying unbounded variance. Each column of `unbounded` is a
// phase-space direction d whose contribution to the covariance is the limit
// lambda -> inf of lambda * d d^T. This is how ideal (infinitely squeezed)
// ancillae are represented exactly: finite covariance entries stay exact and
// homodyne conditioning takes the limit in closed form instead of pushing a
// huge variance through ill-conditioned arithmetic.
struct GaussianState {
  int n_modes = 0;
  Eigen::VectorXd mean;      // length 2n
  Eigen::MatrixXd cov;       // 2n x 2n, symmetric
  Eigen::MatrixXd unbounded; // 2n x k, k == 0 for physical states

  int x_index(int mode) const { return mode; }
  int p_index(int mode) const { return n_modes + mode; }
  bool has_unbounded() const { return unbounded.cols() > 0; }

  // Appends the modes of `other` after this state's modes (tensor product).
  void append(const GaussianState& other);

  // Drops one mode (marginalizes it out).
  void remove_mode(int mode);

  // Largest absolute asymmetry of cov; should stay within 1e-12.
  double symmetry_error() const;

  // Uncertainty relation: smallest real part of the eigenvalues of
  // cov + (i/2) Omega. Physical states have >= -1e-10. States with unbounded
  // directions are exempt (the check has no meaning in the ideal limit).
  double physicality_margin() const;
  bool is_physical(double tol = 1e-10) const;
};

struct MeasurementRecord {
  std::string label;
  int mode = 0;
  double quadrature_angle = 0.0;  // 0 = x, pi/2 = p; normalized to [0, 2pi)
  double outcome = 0.0;
};

// Loss/squeezing configuration for a simulated run. ancilla_squeezing_db empty
// means the ideal infinitely squeezed ancilla.
struct NoiseConfig {
  std::optional<double> ancilla_squeezing_db;  // nullopt == IDEAL
  double eta_in = 1.0;                         // inner-loop transmission
  double eta_out = 1.0;                        // outer-loop transmission
  double detector_efficiency = 1.0;

  bool ideal_ancilla() const { return !ancilla_squeezing_db.has_value(); }
  bool lossless() const {
    return eta_in == 1.0 && eta_out == 1.0 && detector_efficiency == 1.0;
  }
  void check() const;
};

// Ideal Gaussian gate: mean -> matrix * mean + displacement,
// cov -> matrix * cov * matrix^T.
struct SymplecticOp {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd displacement;

  int n_modes() const { return static_cast<int>(matrix.rows()) / 2; }
  double symplectic_error() const;

  static SymplecticOp identity(int n_modes);
};

double symplectic_error(const Eigen::MatrixXd& m);

// --- state factories ---------------------------------------------------------

GaussianState vacuum(int n_modes);

// x-squeezed vacuum for r > 0: cov = diag(e^{-2r}/2, e^{2r}/2).
GaussianState squeezed_vacuum(double r);

// Squeezing quoted in dB below vacuum: Var(x) = (1/2) * 10^{-db/10}.
GaussianState squeezed_vacuum_db(double db);

// Ideal limit: Var(x) exactly 0, p direction unbounded.
GaussianState ideal_x_squeezed();

double squeezing_db_to_r(double db);
double variance_to_db(double variance_x);

// --- symplectic builders (embedded in an n-mode register) --------------------

// Phase-space rotation: (x, p) -> (x cos t - p sin t, x sin t + p cos t).
SymplecticOp make_rotation(int n_modes, int mode, double theta);

// x-squeezer S(r): diag(e^{-r}, e^{r}) on the chosen mode.
SymplecticOp make_squeeze(int n_modes, int mode, double r);

// Variable beam splitter with transmissivity T on the ordered pair
// (outer, loop):
//   outer' = -sqrt(1-T) outer + sqrt(T) loop
//   loop'  =  sqrt(T) outer + sqrt(1-T) loop
// acting identically on the x and p blocks. At T=1 this is an exact swap.
SymplecticOp make_beamsplitter(int n_modes, int outer, int loop, double transmissivity);

SymplecticOp make_displacement(int n_modes, const Eigen::VectorXd& d);

SymplecticOp compose(const SymplecticOp& second, const SymplecticOp& first);

// --- operations ---------------------------------------------------------------

GaussianState apply(const GaussianState& state, const SymplecticOp& op);

struct HomodyneResult {
  double outcome = 0.0;
  GaussianState state;  // measured mode removed
};

// Homodyne of the quadrature x cos(angle) + p sin(angle) on one mode. The
// conditional state is exact Gaussian conditioning (Schur complement); the
// measured mode is removed afterwards. With `fixed` the outcome is injected
// instead of sampled, which makes runs reproducible.
HomodyneResult homodyne(const GaussianState& state, int mode, double angle, Rng& rng);
HomodyneResult homodyne_fixed(const GaussianState& state, int mode, double angle,
                              double outcome);

// Displaces the quadrature x cos(angle) + p sin(angle) of one mode by `amount`.
GaussianState feedforward_displace(const GaussianState& state, int mode,
                                   double angle, double amount);

// Measurement-induced squeezing gate: beam splitter of reflectivity R0 with an
// ancilla, homodyne of p on the leaving port, feedforward with gain
// sqrt(T0/R0) onto p of the kept mode. With an ideal ancilla the induced map
// is exactly S(-ln sqrt(R0)).
GaussianState measurement_induced_squeeze(const GaussianState& state, int in_mode,
                                          double reflectivity,
                                          const GaussianState& ancilla, Rng& rng);
GaussianState measurement_induced_squeeze_fixed(const GaussianState& state,
                                                int in_mode, double reflectivity,
                                                const GaussianState& ancilla,
                                                double outcome);

// Pure loss of transmission eta on one mode:
// mean -> sqrt(eta) mean, cov -> eta cov + (1-eta)/2 I.
GaussianState loss_channel(const GaussianState& state, int mode, double eta);

struct StateDistance {
  double mean_dist = 0.0;  // Euclidean
  double cov_dist = 0.0;   // Frobenius
};

StateDistance state_distance(const GaussianState& a, const GaussianState& b);

// Marginal over the listed modes, reordered as given.
GaussianState extract_modes(const GaussianState& state, const std::vector<int>& modes);

// Purity proxy det(2 cov); invariant under symplectic maps.
double purity_det(const GaussianState& state);

}  // namespace cvloop
