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
#include <vector>

#include "cvloop/gaussian.hpp"

namespace cvloop {

// Single-mode Gaussian gate in rotation-squeeze-rotation form:
// M = R(theta2) S(r) R(theta1) with r >= 0.
struct EulerForm {
  double theta2 = 0.0;
  double r = 0.0;
  double theta1 = 0.0;
};

Eigen::Matrix2d euler_to_matrix(const EulerForm& e);

// Decomposes a 2x2 symplectic matrix. The r=0 ambiguity is resolved as
// theta1 = 0, theta2 = total rotation.
EulerForm euler_single_mode(const Eigen::Matrix2d& m);

// One programmable interaction between time-bin neighbours (low, low+1):
// a phase on the earlier bin followed by the variable beam splitter. On the
// ordered pair (low, low+1) the unitary is
//   [[sqrt(R) e^{i phase}, sqrt(T)], [sqrt(T) e^{i phase}, -sqrt(R)]].
struct MeshElement {
  int low = 0;          // couples modes (low, low+1)
  double transmissivity = 1.0;
  double phase = 0.0;
};

Eigen::Matrix2cd mesh_element_unitary(const MeshElement& e);

// Linear interferometer as a sequence of adjacent-pair elements followed by
// one residual phase per mode: U = diag(e^{i phases}) * E_K ... E_1, elements
// applied in list order.
struct InterferometerMesh {
  int n_modes = 0;
  std::vector<MeshElement> elements;
  Eigen::VectorXd phases;

  static InterferometerMesh identity(int n_modes);
};

Eigen::MatrixXcd mesh_to_unitary(const InterferometerMesh& mesh);

// Adjacent-pair Givens reduction; at most n(n-1)/2 elements.
InterferometerMesh decompose_interferometer(const Eigen::MatrixXcd& u);

// Passive (orthogonal symplectic) matrices in xxpp ordering have block form
// [[X, -Y], [Y, X]]; the corresponding interferometer unitary is X + iY.
Eigen::MatrixXcd passive_to_unitary(const Eigen::MatrixXd& o);
Eigen::MatrixXd unitary_to_passive(const Eigen::MatrixXcd& u);

// n-mode Gaussian gate as interferometer - squeezers - interferometer,
// up to a final displacement: S = O_out D O_in with
// D = diag(e^{-r_1}..e^{-r_n}, e^{r_1}..e^{r_n}), r_i >= 0 sorted descending.
struct GaussianDecomposition {
  InterferometerMesh mesh_in;
  Eigen::VectorXd squeezers;  // r values, length n
  InterferometerMesh mesh_out;
  Eigen::VectorXd displacement;  // length 2n, applied last
};

GaussianDecomposition bloch_messiah(const SymplecticOp& target);

SymplecticOp decomposition_to_symplectic(const GaussianDecomposition& d);

double reconstruction_error(const GaussianDecomposition& d, const SymplecticOp& target);

}  // namespace cvloop
