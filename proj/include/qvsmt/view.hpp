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
#include <utility>
#include <vector>

#include "qvsmt/expr.hpp"

namespace qvsmt {

enum class Role { Alpha, AlphaIm, BetaRe, BetaIm, Phi, Theta, AmpRe, AmpIm };

const char* role_name(Role r);
bool parse_role(const std::string& s, Role& out);

class UnresolvedSymRef : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Read access to program states for spec translation. The encoder answers
/// with variables and the simulator with constants, so a single translation
/// yields either an SMT constraint or a closed formula to evaluate.
///
/// Branch arguments are full outcome labels; states before a measurement use
/// the matching prefix.
class StateView {
 public:
  virtual ~StateView() = default;

  virtual int n_qubits() const = 0;
  virtual int state_count() const = 0;
  virtual std::vector<std::string> branch_labels() const = 0;

  /// Amplitude pairs (a0, a1) that differ only in this qubit's bit. The
  /// qubit is in state (x, y), up to scale, iff a0*y - a1*x = 0 for all pairs.
  virtual std::vector<std::pair<ComplexTerm, ComplexTerm>> qubit_pairs(int state, int qubit,
                                                                       const std::string& branch) const = 0;
  /// Entry of the full 2^n state vector, qubit 0 most significant.
  virtual ComplexTerm amplitude(int state, std::size_t index, const std::string& branch) const = 0;
  /// Single-qubit component; throws UnresolvedSymRef when the qubit has none.
  virtual RealTerm component(int state, int qubit, const std::string& branch, Role role) const = 0;
  virtual RealTerm param(const std::string& name) const = 0;
};

}  // namespace qvsmt
