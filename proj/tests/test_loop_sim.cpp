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

#include "cvloop/compile.hpp"
#include "cvloop/loop_sim.hpp"
#include "test_support.hpp"

using namespace cvloop;
using namespace cvloop_test;

namespace {

ControlProgram identity_program() {
  return compile_single_mode({0.0, 0.0, 0.0});
}

SymplecticOp random_target(int n, Rng& rng) {
  SymplecticOp target;
  target.matrix = random_symplectic(n, rng);
  target.displacement = Eigen::VectorXd::Zero(2 * n);
  return target;
}

}  // namespace

TEST_CASE("identity program is lossless and exact") {
  const NoiseConfig ideal;
  const RunResult result =
      run(identity_program(), vacuum(1), ideal, OutcomePolicy::sampled(1));
  CHECK(result.output.n_modes == 1);
  const StateDistance d = state_distance(result.output, vacuum(1));
  CHECK(d.mean_dist == 0.0);
  CHECK(d.cov_dist == 0.0);
}

TEST_CASE("compiled squeezer matches the measurement-induced squeezing oracle") {
  const double r = std::log(std::sqrt(2.0));
  const ControlProgram program = compile_single_mode({0.0, r, 0.0});
  const NoiseConfig ideal;
  SUBCASE("vacuum input, ideal ancilla") {
    const RunResult result = run(program, vacuum(1), ideal, OutcomePolicy::sampled(7));
    CHECK(result.output.cov(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(result.output.cov(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("random inputs match the direct composite gate") {
    Rng rng(51);
    for (int i = 0; i < 25; ++i) {
      const GaussianState in = random_state(1, rng);
      const RunResult via_loop = run(program, in, ideal, OutcomePolicy::sampled(i));
      Rng oracle_rng(1000 + i);
      const GaussianState direct = measurement_induced_squeeze(
          in, 0, std::exp(-2.0 * r), ideal_x_squeezed(), oracle_rng);
      const StateDistance d = state_distance(via_loop.output, direct);
      CHECK(d.mean_dist < 1e-9);
      CHECK(d.cov_dist < 1e-9);
    }
  }
}

// Independent covariance-algebra oracle for the noisy single-loop squeezer:
// the event sequence is unrolled by hand with explicit matrices, without any
// simulator or gaussian-core conditioning code.
TEST_CASE("noisy single-mode squeezer matches a hand-unrolled covariance oracle") {
  const double r = 0.45;
  const double reflectivity = std::exp(-2.0 * r);
  const double transmissivity = 1.0 - reflectivity;
  const double gain = std::sqrt(transmissivity / reflectivity);
  const double ancilla_db = 10.0;
  const double eta_in = 0.97, eta_out = 0.93, det_eff = 0.9;

  NoiseConfig noise;
  noise.ancilla_squeezing_db = ancilla_db;
  noise.eta_in = eta_in;
  noise.eta_out = eta_out;
  noise.detector_efficiency = det_eff;

  const ControlProgram program = compile_single_mode({0.0, r, 0.0});
  const RunResult got =
      run(program, vacuum(1), noise, OutcomePolicy::fixed_all(0.3));

  // ---- oracle ----
  // Joint covariance over (input, ancilla) in xxpp ordering (x_i, x_a, p_i, p_a).
  const double anc_var_x = 0.5 * std::pow(10.0, -ancilla_db / 10.0);
  const double anc_var_p = 0.25 / anc_var_x;  // pure squeezed state
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  cov(0, 0) = 0.5;
  cov(2, 2) = 0.5;
  cov(1, 1) = anc_var_x;
  cov(3, 3) = anc_var_p;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();

  auto mode_loss = [&](int mode, double eta) {
    for (int block : {0, 2}) {
      const int i = block + mode;
      mean(i) *= std::sqrt(eta);
      cov.row(i) *= std::sqrt(eta);
      cov.col(i) *= std::sqrt(eta);
      cov(i, i) += (1.0 - eta) * 0.5;
    }
  };

  // Tick 0: input picked into the loop (exact swap, no algebra).
  // Tick 1: inner cycle loss on the input; the ancilla is admitted at its own
  // slot this tick (no outer trip yet), then the T0 interaction couples
  // (outer = ancilla, loop = input).
  mode_loss(0, eta_in);
  Eigen::Matrix4d bs = Eigen::Matrix4d::Identity();
  const double sr = std::sqrt(reflectivity), st = std::sqrt(transmissivity);
  for (int block : {0, 2}) {
    bs(block + 1, block + 1) = -sr;  // ancilla = outer
    bs(block + 1, block + 0) = st;
    bs(block + 0, block + 1) = st;
    bs(block + 0, block + 0) = sr;
  }
  mean = bs * mean;
  cov = bs * cov * bs.transpose();
  // Detector efficiency on the leaving (ancilla) mode, then p homodyne at a
  // pinned outcome.
  mode_loss(1, det_eff);
  const double outcome = 0.3;
  const SchurResult cond = schur_condition(mean, cov, 3, outcome, {1, 3});
  // Tick 2: inner cycle loss, then the feedforward displacement on p.
  Eigen::Vector2d mean2 = cond.mean;   // (x_i, p_i)
  Eigen::Matrix2d cov2 = cond.cov;
  mean2 *= std::sqrt(eta_in);
  cov2 *= eta_in;
  cov2(0, 0) += (1.0 - eta_in) * 0.5;
  cov2(1, 1) += (1.0 - eta_in) * 0.5;
  mean2(1) += gain * outcome;
  // Release swaps the bin to the outer slot, which is read out at the same
  // tick; no further round trip is completed.

  CHECK((got.output.mean - mean2).norm() < 1e-12);
  CHECK((got.output.cov - cov2).norm() < 1e-12);
  (void)eta_out;  // single-pass program: no completed outer round trip
}

TEST_CASE("transcript replay reproduces the final state bit for bit") {
  Rng rng(57);
  const ControlProgram program = compile_gaussian(random_target(2, rng), 2);
  NoiseConfig noise;
  noise.ancilla_squeezing_db = 12.0;
  noise.eta_in = 0.99;

  const RunResult first =
      run(program, vacuum(2), noise, OutcomePolicy::sampled(99));
  const RunResult replay = run(program, vacuum(2), noise,
                               OutcomePolicy::fixed_map(first.transcript.outcomes));
  CHECK(first.output.mean == replay.output.mean);
  CHECK(first.output.cov == replay.output.cov);
}

TEST_CASE("output covariance is identical across seeds") {
  Rng rng(61);
  const ControlProgram program = compile_gaussian(random_target(2, rng), 2);
  NoiseConfig noise;
  noise.ancilla_squeezing_db = 10.0;
  const RunResult base = run(program, vacuum(2), noise, OutcomePolicy::sampled(0));
  for (uint64_t seed = 1; seed < 20; ++seed) {
    const RunResult other = run(program, vacuum(2), noise, OutcomePolicy::sampled(seed));
    CHECK(base.output.cov == other.output.cov);
  }
}

TEST_CASE("bin conservation holds through the transcript") {
  Rng rng(67);
  const ControlProgram program = compile_gaussian(random_target(3, rng), 3);
  const RunResult result =
      run(program, vacuum(3), NoiseConfig{}, OutcomePolicy::sampled(4));
  for (const TranscriptTick& t : result.transcript.ticks)
    CHECK(t.live == t.admitted - t.measured - t.emitted);
  const TranscriptTick& last = result.transcript.ticks.back();
  CHECK(last.emitted == 3);
  CHECK(last.live == 0);
}

TEST_CASE("channel extraction") {
  const NoiseConfig ideal;
  SUBCASE("identity program") {
    const GaussianChannel ch = extract_channel(identity_program(), ideal);
    CHECK((ch.transfer - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
    CHECK(ch.noise.norm() < 1e-12);
    CHECK(ch.displacement.norm() < 1e-12);
  }
  SUBCASE("compiled squeezer returns its symplectic") {
    const double r = std::log(std::sqrt(2.0));
    const GaussianChannel ch =
        extract_channel(compile_single_mode({0.0, r, 0.0}), ideal);
    Eigen::Matrix2d want = Eigen::Matrix2d::Zero();
    want(0, 0) = 1.0 / std::sqrt(2.0);
    want(1, 1) = std::sqrt(2.0);
    CHECK((ch.transfer - want).norm() < 1e-10);
    CHECK(ch.noise.norm() < 1e-10);
  }
  SUBCASE("random two-mode targets round-trip within 1e-8") {
    Rng rng(71);
    for (int i = 0; i < 10; ++i) {
      const SymplecticOp target = random_target(2, rng);
      const GaussianChannel ch = extract_channel(compile_gaussian(target, 2), ideal);
      CHECK((ch.transfer - target.matrix).norm() < 1e-8);
      CHECK(ch.noise.norm() < 1e-9);
    }
  }
  SUBCASE("cubic programs are rejected") {
    CHECK_THROWS_AS(extract_channel(compile_cubic(0.1), ideal),
                    UnsupportedProgramError);
  }
  SUBCASE("channel physicality for lossy configs") {
    Rng rng(73);
    NoiseConfig noise;
    noise.ancilla_squeezing_db = 8.0;
    noise.eta_in = 0.96;
    noise.eta_out = 0.95;
    noise.detector_efficiency = 0.9;
    const GaussianChannel ch =
        extract_channel(compile_gaussian(random_target(2, rng), 2), noise);
    CHECK(ch.physicality_margin() > -1e-9);
  }
}

TEST_CASE("verify reports against targets") {
  Rng rng(79);
  const SymplecticOp target = random_target(2, rng);
  const ControlProgram program = compile_gaussian(target, 2);
  SUBCASE("self-verification passes in the ideal configuration") {
    const VerifyReport report = verify(program, target, NoiseConfig{}, {1e-8, 1e-9});
    CHECK(report.pass);
    CHECK(report.transfer_error < 1e-8);
  }
  SUBCASE("60 dB ancillae keep both errors under 1e-5") {
    NoiseConfig noise;
    noise.ancilla_squeezing_db = 60.0;
    const VerifyReport report = verify(program, target, noise, {1e-5, 1e-5});
    CHECK(report.pass);
  }
  SUBCASE("vacuum ancillae fail loudly") {
    NoiseConfig noise;
    noise.ancilla_squeezing_db = 0.0;
    const VerifyReport report = verify(program, target, noise, {1e-8, 1e-9});
    CHECK(!report.pass);
    CHECK(report.noise_norm > 0.1);
  }
  SUBCASE("noise norm decreases with ancilla squeezing") {
    double previous = std::numeric_limits<double>::infinity();
    for (double db : {0.0, 10.0, 20.0, 40.0, 60.0}) {
      NoiseConfig noise;
      noise.ancilla_squeezing_db = db;
      const VerifyReport report = verify(program, target, noise, {1e-8, 1e-9});
      CHECK(report.noise_norm <= previous + 1e-12);
      previous = report.noise_norm;
    }
  }
}

TEST_CASE("noise budget numbers") {
  SUBCASE("20.5 dB lossless sits exactly at threshold") {
    NoiseConfig noise;
    noise.ancilla_squeezing_db = 20.5;
    const BudgetReport report = noise_budget(noise, 5);
    CHECK(report.effective_squeezing_db == doctest::Approx(20.5).epsilon(1e-12));
    CHECK(report.meets_threshold);
  }
  SUBCASE("15 dB is below threshold") {
    NoiseConfig noise;
    noise.ancilla_squeezing_db = 15.0;
    const BudgetReport report = noise_budget(noise, 0);
    CHECK(report.effective_squeezing_db == doctest::Approx(15.0));
    CHECK(!report.meets_threshold);
    CHECK(report.loss_budget_ok);
  }
  SUBCASE("closed-form loss formula, 25 dB through 1% loss") {
    NoiseConfig noise;
    noise.ancilla_squeezing_db = 25.0;
    noise.eta_in = 0.99;
    const BudgetReport report = noise_budget(noise, 1);
    const double expected =
        -10.0 * std::log10(2.0 * (0.99 * std::pow(10.0, -2.5) / 2.0 + 0.005));
    CHECK(report.effective_squeezing_db == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("2% loss breaks the loss budget") {
    NoiseConfig noise;
    noise.eta_in = 0.98;
    CHECK(!noise_budget(noise, 1).loss_budget_ok);
  }
}

TEST_CASE("execution errors carry ticks") {
  ControlProgram bad = identity_program();
  // Readout of a slot nothing was ever admitted to.
  bad.events.push_back({1, Switch1Event{Switch1Mode::Admit, 0}});
  // duplicate admit -> occupied slot? Instead: feedforward to a dead bin.
  bad.events.pop_back();
  bad.events.push_back({1, FeedforwardEvent{5, 'p', AffineFn{{}, 1.0}}});
  try {
    run(bad, vacuum(1), NoiseConfig{}, OutcomePolicy::sampled(0));
    FAIL("expected ExecutionError");
  } catch (const ExecutionError& e) {
    CHECK(e.tick == 1);
  }
}

TEST_CASE("transcript json schema") {
  const RunResult result =
      run(identity_program(), vacuum(1), NoiseConfig{}, OutcomePolicy::sampled(5));
  const Json j = result.transcript.to_json();
  CHECK(j["format"] == "cvloop-transcript/1");
  CHECK(j.contains("ticks"));
  CHECK(j.contains("output_state"));
  CHECK(j["seed"] == 5);
}
