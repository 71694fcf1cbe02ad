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

#include "cvloop/gaussian.hpp"
#include "test_support.hpp"

using namespace cvloop;
using namespace cvloop_test;

TEST_CASE("vacuum state and invariants") {
  const GaussianState one = vacuum(1);
  CHECK(one.mean.isZero(0.0));
  CHECK(one.cov(0, 0) == doctest::Approx(0.5));
  CHECK(one.cov(1, 1) == doctest::Approx(0.5));

  const GaussianState two = vacuum(2);
  CHECK(two.mean.size() == 4);
  CHECK((two.cov - 0.5 * Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);

  // Vacuum saturates the uncertainty bound.
  const GaussianState three = vacuum(3);
  CHECK(std::abs(three.physicality_margin()) < 1e-12);
  CHECK(three.is_physical());

  CHECK_THROWS_AS(vacuum(0), std::invalid_argument);
}

TEST_CASE("squeezed vacuum variances") {
  CHECK(state_distance(squeezed_vacuum(0.0), vacuum(1)).cov_dist == 0.0);

  // 15 dB of squeezing: Var(x) = 10^{-1.5}/2.
  const GaussianState db15 = squeezed_vacuum_db(15.0);
  CHECK(db15.cov(0, 0) == doctest::Approx(0.0158114).epsilon(1e-5));
  CHECK(variance_to_db(db15.cov(0, 0)) == doctest::Approx(15.0));

  const double r = std::log(std::sqrt(2.0));
  const GaussianState s = squeezed_vacuum(r);
  CHECK(s.cov(0, 0) == doctest::Approx(0.25));
  CHECK(s.cov(1, 1) == doctest::Approx(1.0));
  CHECK(s.is_physical());
}

TEST_CASE("symplectic builders") {
  Rng rng(7);
  SUBCASE("every builder is symplectic") {
    for (int i = 0; i < 50; ++i) {
      const double t = rng.uniform();
      CHECK(make_rotation(3, 1, 4.0 * M_PI * (rng.uniform() - 0.5)).symplectic_error() <
            1e-12);
      CHECK(make_squeeze(3, 0, 2.0 * rng.uniform()).symplectic_error() < 1e-12);
      CHECK(make_beamsplitter(3, 2, 0, t).symplectic_error() < 1e-12);
    }
  }
  SUBCASE("rotation at zero is the identity") {
    CHECK((make_rotation(2, 1, 0.0).matrix - Eigen::MatrixXd::Identity(4, 4)).norm() ==
          0.0);
  }
  SUBCASE("squeeze matches the x-squeezing convention") {
    // S(-ln sqrt(R0)) has x gain sqrt(R0).
    const double reflectivity = 0.3;
    const SymplecticOp op = make_squeeze(1, 0, -std::log(std::sqrt(reflectivity)));
    CHECK(op.matrix(0, 0) == doctest::Approx(std::sqrt(reflectivity)));
    CHECK(op.matrix(1, 1) == doctest::Approx(1.0 / std::sqrt(reflectivity)));
  }
  SUBCASE("beam splitter at T=1 swaps the pair") {
    const SymplecticOp swap = make_beamsplitter(2, 0, 1, 1.0);
    Eigen::VectorXd v(4);
    v << 1.0, 2.0, 3.0, 4.0;
    const Eigen::VectorXd w = swap.matrix * v;
    CHECK(w(0) == doctest::Approx(2.0));
    CHECK(w(1) == doctest::Approx(1.0));
    CHECK(w(2) == doctest::Approx(4.0));
    CHECK(w(3) == doctest::Approx(3.0));
  }
  SUBCASE("transmissivity range is enforced") {
    CHECK_THROWS_AS(make_beamsplitter(2, 0, 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_beamsplitter(2, 0, 1, -0.1), std::invalid_argument);
  }
}

TEST_CASE("apply preserves purity and rotational invariance of vacuum") {
  Rng rng(3);
  SUBCASE("vacuum is rotation invariant") {
    const GaussianState rotated = apply(vacuum(1), make_rotation(1, 0, 1.234));
    CHECK(state_distance(rotated, vacuum(1)).cov_dist < 1e-15);
  }
  SUBCASE("squeeze on vacuum") {
    const GaussianState s =
        apply(vacuum(1), make_squeeze(1, 0, std::log(std::sqrt(2.0))));
    CHECK(s.cov(0, 0) == doctest::Approx(0.25));
    CHECK(s.cov(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("identity leaves any state unchanged") {
    const GaussianState s = random_state(2, rng);
    const GaussianState t = apply(s, SymplecticOp::identity(2));
    CHECK(state_distance(s, t).mean_dist == 0.0);
    CHECK(state_distance(s, t).cov_dist == 0.0);
  }
  SUBCASE("purity det(2 cov) is invariant under symplectic maps") {
    for (int i = 0; i < 20; ++i) {
      const GaussianState s = random_state(2, rng);
      SymplecticOp op;
      op.matrix = random_symplectic(2, rng);
      op.displacement = Eigen::VectorXd::Zero(4);
      const double before = purity_det(s);
      const double after = purity_det(apply(s, op));
      CHECK(after == doctest::Approx(before).epsilon(1e-9));
    }
  }
  SUBCASE("dimension mismatch throws") {
    CHECK_THROWS_AS(apply(vacuum(2), make_rotation(1, 0, 0.3)), std::invalid_argument);
  }
}

TEST_CASE("homodyne conditioning") {
  Rng rng(11);
  SUBCASE("product state: measuring one mode leaves the other untouched") {
    GaussianState joint = squeezed_vacuum(0.7);
    joint.append(random_state(1, rng));
    const HomodyneResult result = homodyne(joint, 1, 0.0, rng);
    CHECK(result.state.n_modes == 1);
    CHECK(result.state.mean(0) == doctest::Approx(joint.mean(0)));
    CHECK(result.state.cov(0, 0) == doctest::Approx(joint.cov(0, 0)));
    CHECK(result.state.cov(1, 1) == doctest::Approx(joint.cov(2, 2)));
  }
  SUBCASE("vacuum p outcomes follow Normal(0, 1/2)") {
    std::vector<double> samples;
    for (int i = 0; i < 10000; ++i)
      samples.push_back(homodyne(vacuum(1), 0, M_PI / 2.0, rng).outcome);
    const double d = ks_statistic_normal(samples, 0.0, 0.5);
    CHECK(d < ks_critical(0.001, samples.size()));
  }
  SUBCASE("conditional covariance matches the Schur complement oracle") {
    // Squeezed + vacuum through a 50:50 splitter, measure x of mode 1.
    GaussianState joint = squeezed_vacuum(0.9);
    joint.append(vacuum(1));
    joint = apply(joint, make_beamsplitter(2, 1, 0, 0.5));
    const double outcome = 0.37;
    const HomodyneResult got = homodyne_fixed(joint, 1, 0.0, outcome);
    const SchurResult expected =
        schur_condition(joint.mean, joint.cov, 1, outcome, {1, 3});
    CHECK((got.state.mean - expected.mean).norm() < 1e-12);
    CHECK((got.state.cov - expected.cov).norm() < 1e-12);
  }
  SUBCASE("conditional covariance does not depend on the outcome") {
    GaussianState joint = random_state(2, rng);
    const HomodyneResult a = homodyne_fixed(joint, 0, 0.3, -1.7);
    const HomodyneResult b = homodyne_fixed(joint, 0, 0.3, 2.4);
    CHECK((a.state.cov - b.state.cov).norm() == 0.0);
  }
  SUBCASE("measuring the squeezed quadrature of an ideal ancilla fails loudly") {
    CHECK_THROWS_AS(homodyne(ideal_x_squeezed(), 0, 0.0, rng), DegenerateHomodyneError);
  }
}

TEST_CASE("feedforward displacement") {
  const GaussianState base = vacuum(1);
  SUBCASE("zero amount is the identity") {
    const GaussianState same = feedforward_displace(base, 0, M_PI / 2.0, 0.0);
    CHECK(state_distance(same, base).mean_dist == 0.0);
  }
  SUBCASE("displacing p moves only the p mean") {
    const GaussianState moved = feedforward_displace(base, 0, M_PI / 2.0, 1.5);
    CHECK(moved.mean(0) == doctest::Approx(0.0));
    CHECK(moved.mean(1) == doctest::Approx(1.5));
    CHECK((moved.cov - base.cov).norm() == 0.0);
  }
}

TEST_CASE("measurement-induced squeezing gate") {
  Rng rng(23);
  SUBCASE("ideal ancilla, vacuum input, R0 = 1/2") {
    const GaussianState out =
        measurement_induced_squeeze(vacuum(1), 0, 0.5, ideal_x_squeezed(), rng);
    CHECK(out.n_modes == 1);
    CHECK(out.cov(0, 0) == doctest::Approx(0.25));
    CHECK(out.cov(1, 1) == doctest::Approx(1.0));
    CHECK(std::abs(out.cov(0, 1)) < 1e-12);
    CHECK(!out.has_unbounded());
  }
  SUBCASE("ideal ancilla reproduces S(-ln sqrt R0) on random inputs") {
    for (double reflectivity : {0.25, 0.5, 0.75}) {
      for (int i = 0; i < 30; ++i) {
        const GaussianState in = random_state(1, rng);
        const GaussianState got =
            measurement_induced_squeeze(in, 0, reflectivity, ideal_x_squeezed(), rng);
        const GaussianState want =
            apply(in, make_squeeze(1, 0, -std::log(std::sqrt(reflectivity))));
        const StateDistance d = state_distance(got, want);
        CHECK(d.mean_dist < 1e-9);
        CHECK(d.cov_dist < 1e-9);
      }
    }
  }
  SUBCASE("unit gain at R0 = T0 = 1/2") {
    CHECK(std::sqrt((1.0 - 0.5) / 0.5) == doctest::Approx(1.0));
  }
  SUBCASE("finite ancilla adds T0 e^{-2r}/2 excess noise in x") {
    const double r = 1.15;
    const double reflectivity = 0.5;
    Rng fixed_rng(1);
    const GaussianState out = measurement_induced_squeeze(
        vacuum(1), 0, reflectivity, squeezed_vacuum(r), fixed_rng);
    const double expected = 0.25 + 0.5 * std::exp(-2.0 * r) / 2.0;
    CHECK(out.cov(0, 0) == doctest::Approx(expected).epsilon(1e-12));

    // Monte Carlo over homodyne outcomes agrees with the closed form.
    Eigen::Vector2d mean_acc = Eigen::Vector2d::Zero();
    Eigen::Matrix2d second_acc = Eigen::Matrix2d::Zero();
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
      const GaussianState sample = measurement_induced_squeeze(
          vacuum(1), 0, reflectivity, squeezed_vacuum(r), rng);
      mean_acc += sample.mean;
      second_acc += sample.mean * sample.mean.transpose() + sample.cov;
    }
    mean_acc /= trials;
    const Eigen::Matrix2d ensemble =
        second_acc / trials - mean_acc * mean_acc.transpose();
    CHECK(ensemble(0, 0) == doctest::Approx(expected).epsilon(0.05));
    CHECK(ensemble(1, 1) == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("reflectivity bounds") {
    Rng r2(0);
    CHECK_THROWS_AS(
        measurement_induced_squeeze(vacuum(1), 0, 1.0, ideal_x_squeezed(), r2),
        std::invalid_argument);
  }
}

TEST_CASE("loss channel") {
  Rng rng(5);
  SUBCASE("eta = 1 is the identity") {
    const GaussianState s = random_state(1, rng);
    const StateDistance d = state_distance(loss_channel(s, 0, 1.0), s);
    CHECK(d.mean_dist == 0.0);
    CHECK(d.cov_dist == 0.0);
  }
  SUBCASE("eta -> 0 approaches vacuum") {
    const GaussianState s = random_state(1, rng);
    const GaussianState out = loss_channel(s, 0, 1e-12);
    CHECK(state_distance(out, vacuum(1)).cov_dist < 1e-9);
    CHECK(state_distance(out, vacuum(1)).mean_dist < 1e-5);
  }
  SUBCASE("15 dB input with 1% loss lands near 13.8 dB") {
    const GaussianState out = loss_channel(squeezed_vacuum_db(15.0), 0, 0.99);
    const double expected_var = 0.99 * std::pow(10.0, -1.5) / 2.0 + 0.01 * 0.5;
    CHECK(out.cov(0, 0) == doctest::Approx(expected_var).epsilon(1e-12));
    CHECK(variance_to_db(out.cov(0, 0)) == doctest::Approx(13.84).epsilon(1e-2));
  }
  SUBCASE("loss is a contraction toward vacuum and stays physical") {
    for (int i = 0; i < 20; ++i) {
      const GaussianState s = random_state(1, rng, 1.5);
      const double eta = 0.05 + 0.9 * rng.uniform();
      const GaussianState out = loss_channel(s, 0, eta);
      CHECK(state_distance(out, vacuum(1)).cov_dist <=
            state_distance(s, vacuum(1)).cov_dist + 1e-12);
      CHECK(out.is_physical());
    }
  }
  SUBCASE("range checking") {
    CHECK_THROWS_AS(loss_channel(vacuum(1), 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(loss_channel(vacuum(1), 0, 1.1), std::invalid_argument);
  }
}

TEST_CASE("state distance") {
  Rng rng(9);
  const GaussianState a = random_state(2, rng);
  SUBCASE("identical states have zero distance") {
    const StateDistance d = state_distance(a, a);
    CHECK(d.mean_dist == 0.0);
    CHECK(d.cov_dist == 0.0);
  }
  SUBCASE("vacuum vs squeezed") {
    const StateDistance d =
        state_distance(vacuum(1), squeezed_vacuum(std::log(std::sqrt(2.0))));
    CHECK(d.cov_dist ==
          doctest::Approx(Eigen::Vector2d(-0.25, 0.5).norm()).epsilon(1e-12));
  }
  SUBCASE("symmetry") {
    const GaussianState b = random_state(2, rng);
    CHECK(state_distance(a, b).cov_dist == doctest::Approx(state_distance(b, a).cov_dist));
    CHECK(state_distance(a, b).mean_dist ==
          doctest::Approx(state_distance(b, a).mean_dist));
  }
  SUBCASE("mode count mismatch throws") {
    CHECK_THROWS_AS(state_distance(vacuum(1), vacuum(2)), std::invalid_argument);
  }
}

TEST_CASE("noise config checks") {
  NoiseConfig noise;
  noise.eta_in = 0.0;
  CHECK_THROWS_AS(noise.check(), std::invalid_argument);
  noise.eta_in = 0.99;
  noise.ancilla_squeezing_db = -3.0;
  CHECK_THROWS_AS(noise.check(), std::invalid_argument);
  noise.ancilla_squeezing_db = 15.0;
  CHECK_NOTHROW(noise.check());
}
