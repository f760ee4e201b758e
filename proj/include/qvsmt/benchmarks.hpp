// Copyright 2026 The qvsmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qvsmt/encoder.hpp"
#include "qvsmt/qpm.hpp"
#include "qvsmt/spec.hpp"

// Benchmark circuits with their specifications and fault-injection mutants.
namespace qvsmt {

class UnsupportedSize : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Benchmark {
  std::string name;
  int size = 0;
  std::string mutation;  // empty for the correct circuit
  ProgramModel program;
  Spec spec;
  Mode mode = Mode::Exact;  // mode the benchmark is normally verified in
};

/// Names: toffoli, tp, add (n = 1..8), qft (2..12), qpe (2..5), gdo (2..24).
/// Size is ignored for toffoli and tp. Throws UnsupportedSize or
/// std::invalid_argument for an unknown name or mutation.
Benchmark generate(const std::string& name, int size = 0, const std::string& mutation = "");

std::vector<std::string> benchmark_names();
std::vector<std::string> mutations_for(const std::string& name);
int default_size(const std::string& name);

/// Spec atom "qubit q at state s is |1>" for a basis-valued qubit.
SpecFormula bit_is_one(int state, int qubit, const std::string& branch = kAllBranches);

}  // namespace qvsmt
