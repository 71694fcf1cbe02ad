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

#include <vector>
#include <string>

namespace cvloop {

// Entry point of the `cvloop` command-line tool; exposed as a library call so
// tests can drive it in-process. Exit codes:
//   0 success / verification passed
//   1 verification failed
//   2 parse or usage error
//   3 non-symplectic (or non-Gaussian) decomposition input
//   4 insufficient ancilla budget
//   5 program validation failure
//   6 execution error during simulation
//   7 verify called on a non-Gaussian program
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, char** argv);

}  // namespace cvloop
