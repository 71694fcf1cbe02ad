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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cvloop/program.hpp"

namespace cvloop {

// How measurement outcomes are produced during a run. Fixed modes make runs
// (and replays) deterministic.
struct OutcomePolicy {
  enum class Kind { Sample, FixedAll, FixedMap };
  Kind kind = Kind::Sample;
  uint64_t seed = 0;
  double fixed_value = 0.0;
  std::map<std::string, double> fixed;

  static OutcomePolicy sampled(uint64_t seed) { return {Kind::Sample, seed, 0.0, {}}; }
  static OutcomePolicy fixed_all(double value) {
    return {Kind::FixedAll, 0, value, {}};
  }
  static OutcomePolicy fixed_map(std::map<std::string, double> values) {
    return {Kind::FixedMap, 0, 0.0, std::move(values)};
  }
};

// Per-tick execution log. Replaying the recorded outcomes through the same
// program and noise reproduces the final state bit for bit.
struct TranscriptTick {
  int tick = 0;
  Json applied = Json::array();  // event echoes with outcomes/amounts
  std::vector<int> outer;        // slot occupancy, -1 for empty
  int inner = -1;
  int admitted = 0;  // cumulative counts after this tick
  int measured = 0;
  int emitted = 0;
  int live = 0;  // positioned modes
};

struct Transcript {
  uint64_t seed = 0;
  std::string outcome_mode;  // "sampled" | "fixed_all" | "fixed_map"
  std::vector<TranscriptTick> ticks;
  std::map<std::string, double> outcomes;  // measurement labels -> values
  std::map<std::string, double> recorded_phases;
  GaussianState output;

  Json to_json() const;
};

struct RunResult {
  GaussianState output;  // emitted bins, in emission (slot) order
  Transcript transcript;
};

// Executes a validated control program on the pulse train.
RunResult run(const ControlProgram& program, const GaussianState& inputs,
              const NoiseConfig& noise, const OutcomePolicy& policy);

// Affine channel on moments: mean -> A mean + d, cov -> A cov A^T + N.
struct GaussianChannel {
  Eigen::MatrixXd transfer;  // A
  Eigen::MatrixXd noise;     // N
  Eigen::VectorXd displacement;

  // Complete positivity margin: smallest eigenvalue of
  // N + (i/2)(Omega - A Omega A^T); physical channels have >= -1e-9.
  double physicality_margin() const;
  Json to_json() const;
};

// Recovers (A, N, d) by propagating basis mean vectors with outcomes pinned
// to zero; valid for Gaussian programs, whose feedforward is affine.
GaussianChannel extract_channel(const ControlProgram& program, const NoiseConfig& noise);

struct VerifyThresholds {
  double transfer_tol = 1e-8;
  double noise_tol = 1e-9;
};

struct VerifyReport {
  GaussianChannel channel;
  double transfer_error = 0.0;
  double noise_norm = 0.0;
  bool pass = false;
  VerifyThresholds thresholds;

  Json to_json() const;  // channel matrices plus errors and thresholds
};

VerifyReport verify(const ControlProgram& program, const SymplecticOp& target,
                    const NoiseConfig& noise, const VerifyThresholds& thresholds);

// Squeezing-vs-loss budget for the fault-tolerance threshold.
struct BudgetReport {
  double effective_squeezing_db = 0.0;  // +inf for an ideal lossless ancilla
  double threshold_db = 20.5;
  bool meets_threshold = false;
  bool loss_budget_ok = false;  // per-round-trip loss below 1%

  Json to_json() const;
};

BudgetReport noise_budget(const NoiseConfig& noise, int round_trips);

}  // namespace cvloop
