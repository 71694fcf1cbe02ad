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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvloop/decomp.hpp"
#include "test_support.hpp"

using namespace cvloop;
using namespace cvloop_test;

TEST_CASE("euler decomposition of 2x2 symplectics") {
  SUBCASE("identity maps to all zeros") {
    const EulerForm e = euler_single_mode(Eigen::Matrix2d::Identity());
    CHECK(e.theta2 == 0.0);
    CHECK(e.r == 0.0);
    CHECK(e.theta1 == 0.0);
  }
  SUBCASE("pure squeezer") {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(0, 0) = 1.0 / std::sqrt(2.0);
    m(1, 1) = std::sqrt(2.0);
    const EulerForm e = euler_single_mode(m);
    CHECK(e.theta2 == doctest::Approx(0.0));
    CHECK(e.r == doctest::Approx(std::log(std::sqrt(2.0))));
    CHECK(e.theta1 == doctest::Approx(0.0));
  }
  SUBCASE("random reconstruction within 1e-10") {
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Matrix2d m = random_symplectic(1, rng, 1.5);
      const EulerForm e = euler_single_mode(m);
      CHECK(e.r >= 0.0);
      CHECK((euler_to_matrix(e) - m).norm() < 1e-10);
    }
  }
  SUBCASE("non-symplectic input is rejected") {
    Eigen::Matrix2d bad;
    bad << 2.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(euler_single_mode(bad), std::invalid_argument);
  }
}

TEST_CASE("interferometer mesh decomposition") {
  Rng rng(29);
  SUBCASE("identity gives an empty mesh") {
    const InterferometerMesh mesh =
        decompose_interferometer(Eigen::MatrixXcd::Identity(4, 4));
    CHECK(mesh.elements.empty());
    CHECK(mesh.phases.isZero(1e-14));
  }
  SUBCASE("a single beam splitter comes back as one element") {
    MeshElement e;
    e.low = 0;
    e.transmissivity = 0.7;
    e.phase = 0.0;
    InterferometerMesh one = InterferometerMesh::identity(2);
    one.elements.push_back(e);
    const Eigen::MatrixXcd u = mesh_to_unitary(one);
    const InterferometerMesh back = decompose_interferometer(u);
    REQUIRE(back.elements.size() == 1);
    CHECK(back.elements[0].low == 0);
    CHECK(back.elements[0].transmissivity == doctest::Approx(0.7));
    CHECK(back.elements[0].phase == doctest::Approx(0.0));
    CHECK(back.phases.isZero(1e-12));
  }
  SUBCASE("random unitaries reconstruct within 1e-10") {
    for (int n : {2, 3, 4, 6, 8}) {
      for (int i = 0; i < 25; ++i) {
        const Eigen::MatrixXcd u = random_unitary(n, rng);
        const InterferometerMesh mesh = decompose_interferometer(u);
        CHECK(static_cast<int>(mesh.elements.size()) <= n * (n - 1) / 2);
        for (const MeshElement& e : mesh.elements) {
          CHECK(e.low >= 0);
          CHECK(e.low + 1 < n);
          CHECK(e.transmissivity >= 0.0);
          CHECK(e.transmissivity <= 1.0);
        }
        CHECK((mesh_to_unitary(mesh) - u).norm() < 1e-10);
      }
    }
  }
  SUBCASE("non-unitary input is rejected") {
    Eigen::MatrixXcd bad = 2.0 * Eigen::MatrixXcd::Identity(3, 3);
    CHECK_THROWS_AS(decompose_interferometer(bad), std::invalid_argument);
  }
}

TEST_CASE("passive symplectic / unitary bridge") {
  Rng rng(31);
  SUBCASE("identity") {
    const Eigen::MatrixXcd u = passive_to_unitary(Eigen::MatrixXd::Identity(6, 6));
    CHECK((u - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-15);
  }
  SUBCASE("single-mode rotation becomes a phase") {
    const Eigen::MatrixXd o = make_rotation(2, 0, 0.8).matrix;
    const Eigen::MatrixXcd u = passive_to_unitary(o);
    CHECK(std::abs(u(0, 0) - std::polar(1.0, 0.8)) < 1e-14);
    CHECK(std::abs(u(1, 1) - 1.0) < 1e-14);
    CHECK(std::abs(u(0, 1)) < 1e-14);
  }
  SUBCASE("round trip is exact") {
    for (int i = 0; i < 20; ++i) {
      const Eigen::MatrixXcd u = random_unitary(4, rng);
      const Eigen::MatrixXcd back = passive_to_unitary(unitary_to_passive(u));
      CHECK((back - u).norm() < 1e-12);
    }
  }
  SUBCASE("active matrices are rejected") {
    CHECK_THROWS_AS(passive_to_unitary(make_squeeze(2, 0, 0.5).matrix),
                    std::invalid_argument);
  }
}

TEST_CASE("bloch-messiah decomposition") {
  Rng rng(37);
  SUBCASE("identity target") {
    const GaussianDecomposition d = bloch_messiah(SymplecticOp::identity(3));
    CHECK(d.squeezers.isZero(1e-12));
    CHECK(d.mesh_in.elements.empty());
    CHECK(d.mesh_out.elements.empty());
    CHECK(reconstruction_error(d, SymplecticOp::identity(3)) < 1e-10);
  }
  SUBCASE("embedded single-mode squeezer") {
    SymplecticOp target = SymplecticOp::identity(2);
    const double r = 0.8;
    target.matrix(0, 0) = std::exp(-r);
    target.matrix(2, 2) = std::exp(r);
    const GaussianDecomposition d = bloch_messiah(target);
    CHECK(d.squeezers(0) == doctest::Approx(r));
    CHECK(d.squeezers(1) == doctest::Approx(0.0));
    CHECK(reconstruction_error(d, target) < 1e-10);
  }
  SUBCASE("random targets reconstruct within 1e-8") {
    for (int n : {2, 3, 4}) {
      for (int i = 0; i < 40; ++i) {
        SymplecticOp target;
        target.matrix = random_symplectic(n, rng);
        target.displacement = Eigen::VectorXd::Zero(2 * n);
        const GaussianDecomposition d = bloch_messiah(target);
        CHECK(static_cast<int>(d.squeezers.size()) == n);
        for (int k = 0; k + 1 < n; ++k) CHECK(d.squeezers(k) >= d.squeezers(k + 1));
        CHECK(d.squeezers.minCoeff() >= 0.0);
        CHECK(reconstruction_error(d, target) < 1e-8);
      }
    }
  }
  SUBCASE("displacements carry through") {
    SymplecticOp target;
    target.matrix = random_symplectic(2, rng);
    target.displacement = Eigen::VectorXd::LinSpaced(4, 0.1, 0.4);
    const GaussianDecomposition d = bloch_messiah(target);
    CHECK((d.displacement - target.displacement).norm() == 0.0);
  }
  SUBCASE("non-symplectic input is rejected") {
    SymplecticOp bad = SymplecticOp::identity(2);
    bad.matrix(0, 1) = 0.3;
    CHECK_THROWS_AS(bloch_messiah(bad), std::invalid_argument);
  }
}
