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
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cvloop/gaussian.hpp"

namespace cvloop {

using Json = nlohmann::ordered_json;

// --- classical control functions ---------------------------------------------
//
// Feedforward amounts and dynamic phases are named closed forms over recorded
// measurement outcomes, so programs stay serializable:
//   affine:        sum_i gains[label_i] * outcome[label_i] + offset
//   arctan_scaled: arctan(scale * outcome[source])
//   sec_scaled:    scale * outcome[source] / cos(value[phase_source])

struct AffineFn {
  std::vector<std::pair<std::string, double>> gains;  // label -> gain
  double offset = 0.0;
};

struct ArctanScaledFn {
  double scale = 0.0;
  std::string source;
};

struct SecScaledFn {
  double scale = 0.0;
  std::string source;        // measured outcome label
  std::string phase_source;  // recorded dynamic phase label
};

using ControlFn = std::variant<AffineFn, ArctanScaledFn, SecScaledFn>;

bool is_affine(const ControlFn& fn);
// Labels the function reads (measurement labels and recorded phase labels).
std::vector<std::string> referenced_labels(const ControlFn& fn);
double evaluate(const ControlFn& fn, const std::map<std::string, double>& values);

// --- timed events -------------------------------------------------------------

enum class Switch1Mode { Admit, Recirculate, Readout };
enum class Switch2Route { ToDetector, ToOuter };

struct Switch1Event {
  Switch1Mode mode = Switch1Mode::Recirculate;
  int bin = -1;  // pulse id for Admit
};

struct Switch2Event {
  Switch2Route route = Switch2Route::ToOuter;
};

struct VbsEvent {
  double transmissivity = 0.0;
};

struct Phase1Event {
  double theta = 0.0;
};

struct Phase2Event {
  // Either a fixed phase or a dynamic one computed from outcomes. Dynamic
  // phases record their value under `record_as` for later feedforward use.
  bool dynamic = false;
  double phi = 0.0;
  ControlFn fn = AffineFn{};
  std::string record_as = "phi";
};

struct MeasureEvent {
  std::string label;
  double quadrature_angle = 0.0;
};

struct FeedforwardEvent {
  int target_bin = -1;
  char quadrature = 'p';  // 'x' or 'p'
  ControlFn fn = AffineFn{};
};

using EventBody = std::variant<Switch1Event, Switch2Event, VbsEvent, Phase1Event,
                               Phase2Event, MeasureEvent, FeedforwardEvent>;

struct Event {
  int tick = 0;
  EventBody body;
};

// --- ancilla schedule -----------------------------------------------------------

enum class AncillaKind { Squeezed, Cubic };

struct AncillaSlot {
  int bin = 0;  // pulse id in the train
  AncillaKind kind = AncillaKind::Squeezed;
  double gamma = 0.0;  // cubic ancilla parameter gamma'
};

// --- control program ------------------------------------------------------------

struct Violation {
  int tick = 0;  // -1 for global rules
  std::string rule;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Time-quantized event timeline for the nested-loop hardware. One tick is one
// inner-loop round trip tau; the outer loop holds tau_prime bins.
struct ControlProgram {
  int tau_prime = 0;
  int n_inputs = 0;
  int n_ancillas = 0;
  std::vector<AncillaSlot> ancilla_schedule;
  std::vector<Event> events;

  bool is_gaussian() const;  // no cubic ancillae, all control functions affine
  int last_tick() const;

  Json to_json() const;
  static ControlProgram from_json(const Json& j);
};

ValidationReport validate(const ControlProgram& program);

// --- circuit intermediate representation ----------------------------------------

struct RotationGate {
  int mode;
  double theta;
};
struct SqueezeGate {
  int mode;
  double r;
};
// Phase shift on mode i followed by the variable beam splitter coupling
// (outer = j, loop = i); equals one mesh element when j == i + 1.
struct BeamSplitterGate {
  int mode_i;
  int mode_j;
  double transmissivity;
  double phase = 0.0;
};
struct DisplaceGate {
  int mode;
  double dx;
  double dp;
};
struct CubicPhaseGate {
  int mode;
  double gamma;
};

using Instruction = std::variant<RotationGate, SqueezeGate, BeamSplitterGate,
                                 DisplaceGate, CubicPhaseGate>;

struct CircuitIR {
  int n_inputs = 0;
  std::vector<Instruction> instructions;

  bool has_cubic() const;
  Json to_json() const;
  static CircuitIR from_json(const Json& j);
};

// Folds a Gaussian circuit into a single symplectic map. Throws
// std::invalid_argument if the circuit contains a cubic phase gate.
SymplecticOp circuit_to_symplectic(const CircuitIR& circuit);

// JSON helpers shared by the file formats.
Json state_to_json(const GaussianState& s);
GaussianState state_from_json(const Json& j);
Json noise_to_json(const NoiseConfig& noise);
NoiseConfig noise_from_json(const Json& j);

}  // namespace cvloop
