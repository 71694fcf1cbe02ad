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

#include "cvloop/decomp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace cvloop {

namespace {

constexpr double kSymplecticTol = 1e-10;
constexpr double kUnitaryTol = 1e-10;
constexpr double kPassiveTol = 1e-10;
constexpr double kDegenerateSigmaTol = 1e-13;
constexpr double kUnitEigenTol = 1e-10;
constexpr double kNegligibleEntry = 1e-14;

double wrap_angle(double theta) {
  // Normalize to (-pi, pi].
  theta = std::fmod(theta, 2.0 * M_PI);
  if (theta <= -M_PI) theta += 2.0 * M_PI;
  if (theta > M_PI) theta -= 2.0 * M_PI;
  return theta;
}

}  // namespace

Eigen::Matrix2d euler_to_matrix(const EulerForm& e) {
  auto rot = [](double t) {
    Eigen::Matrix2d r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
  };
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  s(0, 0) = std::exp(-e.r);
  s(1, 1) = std::exp(e.r);
  return rot(e.theta2) * s * rot(e.theta1);
}

EulerForm euler_single_mode(const Eigen::Matrix2d& m) {
  if (symplectic_error(m) > kSymplecticTol)
    throw std::invalid_argument("input matrix is not symplectic");

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double sigma = svd.singularValues()(0);

  EulerForm e;
  if (sigma - 1.0 < kDegenerateSigmaTol) {
    // Pure rotation; SVD factors are ambiguous here, read the angle directly.
    e.theta2 = std::atan2(m(1, 0), m(0, 0));
    return e;
  }

  Eigen::Matrix2d u = svd.matrixU();
  Eigen::Matrix2d v = svd.matrixV();
  // det(M) = +1 forces det(U) det(V) = +1; flip a reflection pair if needed so
  // both factors are rotations.
  if (u.determinant() < 0.0) {
    u.col(1) *= -1.0;
    v.col(1) *= -1.0;
  }
  const double alpha = std::atan2(u(1, 0), u(0, 0));
  const double beta = -std::atan2(v(1, 0), v(0, 0));  // V^T = R(beta)
  // M = R(alpha) diag(sigma, 1/sigma) R(beta) and
  // diag(sigma, 1/sigma) = R(pi/2) S(ln sigma) R(-pi/2).
  e.theta2 = wrap_angle(alpha + M_PI / 2.0);
  e.r = std::log(sigma);
  e.theta1 = wrap_angle(beta - M_PI / 2.0);
  // R(t2) S(r) R(t1) == R(t2 - pi) S(r) R(t1 - pi); pin theta1 to
  // (-pi/2, pi/2] so the output is unique.
  if (e.theta1 > M_PI / 2.0) {
    e.theta1 = wrap_angle(e.theta1 - M_PI);
    e.theta2 = wrap_angle(e.theta2 - M_PI);
  } else if (e.theta1 <= -M_PI / 2.0) {
    e.theta1 = wrap_angle(e.theta1 + M_PI);
    e.theta2 = wrap_angle(e.theta2 + M_PI);
  }
  if (e.theta1 == -0.0) e.theta1 = 0.0;
  if (e.theta2 == -0.0) e.theta2 = 0.0;
  return e;
}

Eigen::Matrix2cd mesh_element_unitary(const MeshElement& e) {
  const double st = std::sqrt(e.transmissivity);
  const double sr = std::sqrt(1.0 - e.transmissivity);
  const std::complex<double> ph = std::polar(1.0, e.phase);
  Eigen::Matrix2cd u;
  u << sr * ph, st, st * ph, -sr;
  return u;
}

InterferometerMesh InterferometerMesh::identity(int n_modes) {
  InterferometerMesh mesh;
  mesh.n_modes = n_modes;
  mesh.phases = Eigen::VectorXd::Zero(n_modes);
  return mesh;
}

Eigen::MatrixXcd mesh_to_unitary(const InterferometerMesh& mesh) {
  const int n = mesh.n_modes;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
  for (const MeshElement& e : mesh.elements) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(n, n);
    g.block<2, 2>(e.low, e.low) = mesh_element_unitary(e);
    u = g * u;
  }
  for (int j = 0; j < n; ++j) u.row(j) *= std::polar(1.0, mesh.phases(j));
  return u;
}

InterferometerMesh decompose_interferometer(const Eigen::MatrixXcd& u) {
  const int n = static_cast<int>(u.rows());
  if (u.cols() != n) throw std::invalid_argument("matrix must be square");
  if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).norm() > kUnitaryTol)
    throw std::invalid_argument("input matrix is not unitary");

  InterferometerMesh mesh;
  mesh.n_modes = n;
  mesh.phases = Eigen::VectorXd::Zero(n);

  // Reduce W = U^dagger to diagonal by left-multiplying mesh elements that
  // zero the upper triangle, columns right to left, rows top down. Each
  // element G combines adjacent rows i, i+1 as
  //   row_i'    =  sqrt(R) e^{i phi} row_i + sqrt(T) row_{i+1}
  //   row_{i+1}' = sqrt(T) e^{i phi} row_i - sqrt(R) row_{i+1}.
  // From G_K ... G_1 U^dagger = D it follows U = conj(D) G_K ... G_1, i.e.
  // the recorded elements applied in order followed by residual phases.
  Eigen::MatrixXcd w = u.adjoint();
  for (int col = n - 1; col >= 1; --col) {
    for (int row = 0; row < col; ++row) {
      const std::complex<double> a = w(row, col);
      const std::complex<double> b = w(row + 1, col);
      const double na = std::abs(a), nb = std::abs(b);
      if (na < kNegligibleEntry) continue;  // already zero
      MeshElement e;
      e.low = row;
      if (nb < kNegligibleEntry) {
        e.transmissivity = 1.0;  // plain swap of the two rows
        e.phase = 0.0;
      } else {
        e.transmissivity = (na * na) / (na * na + nb * nb);
        e.phase = std::arg(-b / a);
      }
      Eigen::Matrix2cd g = mesh_element_unitary(e);
      Eigen::MatrixXcd rows = w.block(row, 0, 2, n);
      w.block(row, 0, 2, n) = g * rows;
      mesh.elements.push_back(e);
    }
  }
  for (int j = 0; j < n; ++j) mesh.phases(j) = -std::arg(w(j, j));
  return mesh;
}

Eigen::MatrixXcd passive_to_unitary(const Eigen::MatrixXd& o) {
  const int n = static_cast<int>(o.rows()) / 2;
  if (o.rows() != 2 * n || o.cols() != 2 * n)
    throw std::invalid_argument("matrix must be 2n x 2n");
  const Eigen::MatrixXd x = o.topLeftCorner(n, n);
  const Eigen::MatrixXd y = o.bottomLeftCorner(n, n);
  double block_err = (o.topRightCorner(n, n) + y).norm() +
                     (o.bottomRightCorner(n, n) - x).norm();
  if (block_err > kPassiveTol || symplectic_error(o) > kPassiveTol ||
      (o.transpose() * o - Eigen::MatrixXd::Identity(2 * n, 2 * n)).norm() > kPassiveTol)
    throw std::invalid_argument("matrix is not passive (orthogonal symplectic)");
  return x + std::complex<double>(0, 1) * y;
}

Eigen::MatrixXd unitary_to_passive(const Eigen::MatrixXcd& u) {
  const int n = static_cast<int>(u.rows());
  Eigen::MatrixXd o(2 * n, 2 * n);
  o.topLeftCorner(n, n) = u.real();
  o.topRightCorner(n, n) = -u.imag();
  o.bottomLeftCorner(n, n) = u.imag();
  o.bottomRightCorner(n, n) = u.real();
  return o;
}

GaussianDecomposition bloch_messiah(const SymplecticOp& target) {
  const Eigen::MatrixXd& s = target.matrix;
  const int n = target.n_modes();
  if (symplectic_error(s) > kSymplecticTol)
    throw std::invalid_argument("input matrix is not symplectic");

  // S = O_out D O_in with O_out the symplectic eigenbasis of sqrt(S S^T).
  // W = S S^T has eigenpairs (w, b) and (1/w, Omega b); a passive Q is
  // assembled column-wise from q_{n+k} = b (eigenvalue e^{2 r_k} > 1) and
  // q_k = Omega b.
  const Eigen::MatrixXd w = s * s.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
  const Eigen::VectorXd vals = eig.eigenvalues();  // ascending
  const Eigen::MatrixXd vecs = eig.eigenvectors();
  const Eigen::MatrixXd omega = symplectic_form(n);

  std::vector<int> squeezed_idx;  // eigenvalues > 1
  std::vector<int> unit_idx;      // eigenvalue cluster at 1
  for (int i = 0; i < 2 * n; ++i) {
    if (vals(i) > 1.0 + kUnitEigenTol) squeezed_idx.push_back(i);
    else if (vals(i) > 1.0 - kUnitEigenTol) unit_idx.push_back(i);
  }
  const int n_squeezed = static_cast<int>(squeezed_idx.size());
  if (n_squeezed > n || static_cast<int>(unit_idx.size()) != 2 * (n - n_squeezed))
    throw std::invalid_argument("eigenvalue structure is not symplectic");

  Eigen::MatrixXd q(2 * n, 2 * n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  // Largest squeezing first.
  for (int k = 0; k < n_squeezed; ++k) {
    const Eigen::VectorXd b = vecs.col(squeezed_idx[n_squeezed - 1 - k]);
    r(k) = 0.5 * std::log(vals(squeezed_idx[n_squeezed - 1 - k]));
    q.col(n + k) = b;
    q.col(k) = omega * b;
  }
  // Eigenvalue-1 cluster: pick pairs (v, -Omega v) inside the cluster span.
  if (!unit_idx.empty()) {
    Eigen::MatrixXd basis(2 * n, unit_idx.size());
    for (size_t i = 0; i < unit_idx.size(); ++i) basis.col(i) = vecs.col(unit_idx[i]);
    int k = n_squeezed;
    while (basis.cols() > 0) {
      const Eigen::VectorXd v = basis.col(0).normalized();
      const Eigen::VectorXd pv = -omega * v;
      q.col(k) = v;
      q.col(n + k) = pv;
      ++k;
      if (basis.cols() <= 2) break;
      // Project the pair out of the remaining cluster basis. Column pivoting
      // keeps the leading columns spanning the (rank-deficient) projection.
      Eigen::MatrixXd rest = basis.rightCols(basis.cols() - 1);
      rest -= v * (v.transpose() * rest);
      rest -= pv * (pv.transpose() * rest);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rest);
      Eigen::MatrixXd thin_q =
          qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, rest.cols());
      basis = thin_q.leftCols(basis.cols() - 2);
    }
  }

  Eigen::VectorXd d_diag(2 * n);
  for (int k = 0; k < n; ++k) {
    d_diag(k) = std::exp(-r(k));
    d_diag(n + k) = std::exp(r(k));
  }
  const Eigen::MatrixXd o_in = d_diag.cwiseInverse().asDiagonal() * q.transpose() * s;

  GaussianDecomposition out;
  out.squeezers = r;
  out.mesh_out = decompose_interferometer(passive_to_unitary(q));
  out.mesh_in = decompose_interferometer(passive_to_unitary(o_in));
  out.displacement = target.displacement.size() == 2 * n
                         ? target.displacement
                         : Eigen::VectorXd::Zero(2 * n);
  return out;
}

SymplecticOp decomposition_to_symplectic(const GaussianDecomposition& d) {
  const int n = d.mesh_in.n_modes;
  Eigen::VectorXd d_diag(2 * n);
  for (int k = 0; k < n; ++k) {
    d_diag(k) = std::exp(-d.squeezers(k));
    d_diag(n + k) = std::exp(d.squeezers(k));
  }
  const Eigen::MatrixXd o_in = unitary_to_passive(mesh_to_unitary(d.mesh_in));
  const Eigen::MatrixXd o_out = unitary_to_passive(mesh_to_unitary(d.mesh_out));
  SymplecticOp op;
  op.matrix = o_out * d_diag.asDiagonal() * o_in;
  op.displacement = d.displacement;
  return op;
}

double reconstruction_error(const GaussianDecomposition& d, const SymplecticOp& target) {
  return (decomposition_to_symplectic(d).matrix - target.matrix).norm();
}

}  // namespace cvloop
