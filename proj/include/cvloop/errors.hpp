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

#include <stdexcept>
#include <string>

namespace cvloop {

// Homodyne of a quadrature with zero marginal variance. Only reachable by
// measuring the exactly-squeezed quadrature of an ideal ancilla.
class DegenerateHomodyneError : public std::runtime_error {
 public:
  explicit DegenerateHomodyneError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// A control program event could not be executed (empty slot, unknown label, ...).
class ExecutionError : public std::runtime_error {
 public:
  ExecutionError(int tick, const std::string& msg)
      : std::runtime_error("tick " + std::to_string(tick) + ": " + msg),
        tick(tick) {}
  int tick;
};

// Gaussian channel extraction was asked to process a non-Gaussian program.
class UnsupportedProgramError : public std::runtime_error {
 public:
  explicit UnsupportedProgramError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Compilation needs more squeezed ancilla pulses than the caller budgeted.
class InsufficientAncillaError : public std::runtime_error {
 public:
  InsufficientAncillaError(int required, int budget)
      : std::runtime_error("target needs " + std::to_string(required) +
                           " squeezed ancilla pulses, budget is " +
                           std::to_string(budget)),
        required(required),
        budget(budget) {}
  int required;
  int budget;
};

// Truncated Fock-space operation lost more norm than the configured bound.
class CutoffError : public std::runtime_error {
 public:
  explicit CutoffError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cvloop
