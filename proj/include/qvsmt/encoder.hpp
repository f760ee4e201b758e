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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qvsmt/expr.hpp"
#include "qvsmt/gates.hpp"
#include "qvsmt/qpm.hpp"
#include "qvsmt/view.hpp"

namespace qvsmt {

enum class Mode { Exact, Box };

const char* mode_name(Mode m);

struct EncodeOptions {
  Mode mode = Mode::Exact;
  bool box_keep_eq1 = false;  // Box mode keeps alpha = cos(theta/2) and friends
  SmtOptions smt;

  bool phase_vars() const { return mode == Mode::Exact || box_keep_eq1; }
};

/// One qubit at one state and branch. Canonical blocks (inputs, measured
/// qubits) have a real alpha and Bloch angles; derived blocks are outputs of
/// gate mappings and carry a complex alpha with no shape constraints.
struct QubitBlock {
  int state = 0;
  int qubit = 0;
  std::string branch;
  bool canonical = true;
  ComplexTerm alpha;
  ComplexTerm beta;
  std::optional<RealTerm> phi;
  std::optional<RealTerm> theta;
};

struct SymbolicStateVector {
  std::vector<int> qubits;  // ascending
  int state = 0;
  std::string branch;
  std::vector<ComplexTerm> amps;
};

/// Variable naming. Blocks: `{role}_{state}_{qubit}[_{branch}]`; vectors:
/// `s_{state}_g{q.q.q}_{index}_{re|im}[_{branch}]`.
std::string block_var(const std::string& role, int state, int qubit, const std::string& branch);
std::string vector_var(int state, const std::vector<int>& qubits, std::size_t index, bool im, const std::string& branch);

/// Shape constraints for a canonical block: Bloch parametrisation and angle
/// ranges in Exact mode, the [-1, 1] box in Box mode.
Constraint qubit_constraints(const QubitBlock& q, const EncodeOptions& opts);

// Term-level building blocks, exposed for testing.

/// Kronecker product; a holds the more significant qubits.
std::vector<ComplexTerm> tensor_terms(const std::vector<ComplexTerm>& a, const std::vector<ComplexTerm>& b);
/// (U on op_qubits, identity elsewhere) applied to amps over group_qubits.
/// Zero matrix entries produce no terms.
std::vector<ComplexTerm> apply_matrix_terms(const GateMatrix& u, const std::vector<int>& group_qubits,
                                            const std::vector<int>& op_qubits, const std::vector<ComplexTerm>& amps);
/// Unnormalised amplitudes of the unmeasured qubits for one outcome.
std::vector<ComplexTerm> project_terms(const std::vector<int>& group_qubits, const std::vector<ComplexTerm>& amps,
                                       const std::vector<int>& measured, const std::vector<int>& outcome);

/// Representation of every qubit at one (state, branch).
struct Snapshot {
  struct Group {
    std::vector<int> qubits;
    bool is_block = true;
    QubitBlock block;
    SymbolicStateVector vec;
  };
  int state = 0;
  std::string branch;
  std::vector<Group> groups;
  std::vector<int> group_of;
  std::vector<signed char> bit;  // known computational-basis value, -1 unknown
  std::vector<char> basis;  // qubit is some basis state
};

struct BranchProbability {
  std::string label;
  RealTerm p;
};

/// Resolves symbol references against the encoded program.
class SymbolTable : public StateView {
 public:
  int n_qubits() const override { return n_qubits_; }
  int state_count() const override { return static_cast<int>(measured_before_.size()); }
  std::vector<std::string> branch_labels() const override { return labels_; }
  std::vector<std::pair<ComplexTerm, ComplexTerm>> qubit_pairs(int state, int qubit,
                                                               const std::string& branch) const override;
  ComplexTerm amplitude(int state, std::size_t index, const std::string& branch) const override;
  RealTerm component(int state, int qubit, const std::string& branch, Role role) const override;
  RealTerm param(const std::string& name) const override;

  const Snapshot& snapshot(int state, const std::string& branch) const;
  /// Variable names of a block, role -> name.
  std::vector<std::pair<Role, std::string>> block_vars(int state, int qubit, const std::string& branch) const;

 private:
  friend class Encoder;
  int n_qubits_ = 0;
  std::vector<int> measured_before_;  // per state
  std::vector<std::string> labels_;
  std::vector<std::string> params_;
  std::map<std::pair<int, std::string>, Snapshot> snaps_;
};

struct EncodingResult {
  std::vector<std::string> decls;  // state-major, qubit-minor, branch suffix
  std::vector<Constraint> qubit_constraints;
  std::vector<Constraint> initial;
  std::vector<Constraint> operations;
  std::vector<BranchProbability> probabilities;
  SymbolTable table;
  int tensor_merges = 0;
  int mapping_ops = 0;
  int matrix_ops = 0;

  Constraint formula() const;
  /// Sections qubit-constraints, initial, operations, plus any extra.
  SmtScript script(std::vector<SmtSection> extra = {}) const;
};

EncodingResult encode(const ProgramModel& p, const EncodeOptions& opts);

}  // namespace qvsmt
