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

#include "cvloop/errors.hpp"
#include "cvloop/rng.hpp"

namespace cvloop {
namespace fock {

// Truncated number-basis state. Amplitude layout: mode 0 varies fastest,
// index = n_0 + cutoff * n_1 + cutoff^2 * n_2 + ...
struct FockState {
  int cutoff = 0;
  int n_modes = 0;
  Eigen::VectorXcd amps;
  double leakage_bound = 1e-6;  // per-operation norm-loss tolerance
  double last_leakage = 0.0;
  double total_leakage = 0.0;

  double norm() const { return amps.norm(); }

  // Renormalizes after an operation that lost `lost` norm-squared to
  // truncation; throws CutoffError if the loss exceeds the bound.
  void absorb_leakage(double lost, const char* what);
};

// x and p matrices at the cutoff, [x, p] = i away from the truncation edge.
struct QuadratureOperators {
  int cutoff = 0;
  Eigen::MatrixXcd x;
  Eigen::MatrixXcd p;

  static const QuadratureOperators& at(int cutoff);  // cached
};

// --- state preparation ---------------------------------------------------------

FockState fock_vacuum(int cutoff, int n_modes = 1);
FockState coherent_state(double x0, double p0, int cutoff);
// x-squeezed vacuum for r > 0 (anti-squeezed for r < 0). Anti-squeezed
// envelopes have heavy number-basis tails, so the truncation-loss bound is a
// parameter here.
FockState squeezed_state(double r, int cutoff, double leakage_bound = 1e-6);
FockState tensor(const FockState& a, const FockState& b);

// Cubic-phase resource: exp(i gamma' x^3) applied to an x-anti-squeezed
// vacuum of parameter r; approaches the ideal flat superposition as r grows.
FockState cubic_ancilla(double gamma_prime, double r, int cutoff,
                        double leakage_bound = 1e-6);

// --- gates -----------------------------------------------------------------------

void apply_rotation(FockState& state, int mode, double theta);
void apply_squeeze(FockState& state, int mode, double r);
void apply_displacement(FockState& state, int mode, double dx, double dp);
void apply_cubic_phase(FockState& state, int mode, double gamma_prime);

// Variable beam splitter on the ordered pair (outer, loop) with the same
// quadrature convention as the Gaussian backend:
//   a_outer' = -sqrt(1-T) a_outer + sqrt(T) a_loop
//   a_loop'  =  sqrt(T) a_outer + sqrt(1-T) a_loop
void apply_beamsplitter(FockState& state, int outer, int loop, double transmissivity);

// --- measurement -----------------------------------------------------------------

struct Marginal {
  Eigen::VectorXd grid;
  Eigen::VectorXd pdf;
  double mean = 0.0;
  double variance = 0.0;

  double sample(Rng& rng) const;
  double cdf_at(double x) const;
};

// Homodyne marginal of one quadrature, computed from the Hermite-function
// wavefunctions on a grid covering +-6.5 standard deviations.
Marginal quadrature_marginal(const FockState& state, int mode, double angle,
                             int bins = 2001);

struct FockHomodyneResult {
  double outcome = 0.0;
  FockState state;  // measured mode removed
};

FockHomodyneResult homodyne_fock(FockState state, int mode, double angle, Rng& rng,
                                 int bins = 2001);
FockHomodyneResult homodyne_fock_fixed(FockState state, int mode, double angle,
                                       double outcome, int bins = 2001);

struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
};

Moments mean_quadratures(const FockState& state, int mode);

// --- the measurement-induced cubic phase circuit ----------------------------------

struct CubicRunResult {
  FockState output;  // one mode
  double q = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

// Runs the three-pulse circuit: 50:50 with the x-squeezed ancilla, 50:50 with
// the cubic ancilla, x homodyne (q), phase arctan(3 sqrt2 gamma' q), p
// homodyne (y), then displacement of p by sqrt2 y / cos(phi).
CubicRunResult run_cubic_circuit(const FockState& input, double gamma_prime,
                                 double ancilla_r, Rng& rng);
CubicRunResult run_cubic_circuit_fixed(const FockState& input, double gamma_prime,
                                       double ancilla_r, double q, double y);

// Heisenberg-picture prediction of the ideal gate for given input moments:
//   x_out = x_in / sqrt2,  p_out = sqrt2 p_in + (3 gamma'/2) <x_in^2>.
struct CubicPrediction {
  double mean_x = 0.0;
  double mean_p = 0.0;
};

CubicPrediction cubic_gate_prediction(double gamma_prime, double mean_x, double mean_p,
                                      double var_x);

}  // namespace fock
}  // namespace cvloop
