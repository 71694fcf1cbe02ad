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

#include "cvloop/decomp.hpp"
#include "cvloop/program.hpp"

namespace cvloop {

// Single-mode Gaussian gate R(theta2) S(r) R(theta1) as a single-loop program.
// r = 0 degenerates to a pass-through with no ancilla.
ControlProgram compile_single_mode(const EulerForm& euler);

// Arbitrary n-mode Gaussian gate. `ancilla_budget` bounds the number of
// squeezed ancilla pulses; the program consumes exactly as many as the
// Bloch-Messiah form of the target needs. Throws InsufficientAncillaError if
// the budget is too small.
ControlProgram compile_gaussian(const SymplecticOp& target, int ancilla_budget);

// Measurement-induced cubic phase gate C(gamma_target); uses the cubic
// ancilla parameter gamma' = 2 sqrt(2) gamma_target and realizes
// S(ln sqrt(2)) C(gamma_target) on the surviving bin. With `anti_squeeze` a
// third (squeezed) ancilla cancels the S(ln sqrt(2)) factor.
ControlProgram compile_cubic(double gamma_target, bool anti_squeeze = false);

// Number of VBS events with 0 < T < 1 (genuine two-mode interactions; T = 0
// holds and T = 1 swaps are transport).
int count_vbs_interactions(const ControlProgram& program);

}  // namespace cvloop
