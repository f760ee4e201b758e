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

#include <complex>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qvsmt/expr.hpp"

// Quantum program model: qubits, ordered state operations, symbolic
// parameters and initial valuations. States are numbered 0..ops.size().
namespace qvsmt {

enum class GateKind { Identity, X, Z, H, RX, RZ, Rk, SWAP, CX, CZ, Custom, Controlled };

struct GateSpec {
  GateKind kind = GateKind::Identity;
  std::vector<int> targets;
  RealTerm param;  // RX angle, RZ angle, Rk's k
  std::vector<ComplexTerm> matrix;  // Custom, row-major 2^k x 2^k
  std::shared_ptr<const GateSpec> base;  // Controlled
  std::vector<int> controls;  // Controlled

  static GateSpec id(int q) { return single(GateKind::Identity, q); }
  static GateSpec x(int q) { return single(GateKind::X, q); }
  static GateSpec z(int q) { return single(GateKind::Z, q); }
  static GateSpec h(int q) { return single(GateKind::H, q); }
  static GateSpec rx(int q, RealTerm theta);
  static GateSpec rz(int q, RealTerm phi);
  static GateSpec rk(int q, RealTerm k);
  static GateSpec swap(int a, int b);
  static GateSpec cx(int control, int target);
  static GateSpec cz(int control, int target);
  static GateSpec custom(std::vector<int> targets, std::vector<ComplexTerm> matrix);
  /// Nested controls are flattened, so the base is never Controlled/CX/CZ.
  static GateSpec controlled(const GateSpec& base, std::vector<int> controls);

  /// Control qubits (CX/CZ first index, Controlled list).
  std::vector<int> control_qubits() const;
  /// Qubits acted on by the base operation.
  std::vector<int> target_qubits() const;
  /// Controls followed by targets; matrix index bit order, first is the MSB.
  std::vector<int> qubits() const;
  std::string name() const;

 private:
  static GateSpec single(GateKind k, int q) {
    GateSpec g;
    g.kind = k;
    g.targets = {q};
    return g;
  }
};

struct StateOp {
  enum class Kind { Gate, Measure };
  Kind kind = Kind::Gate;
  GateSpec gate;
  std::vector<int> measured;

  static StateOp apply(GateSpec g) {
    StateOp o;
    o.gate = std::move(g);
    return o;
  }
  static StateOp measure(std::vector<int> qs) {
    StateOp o;
    o.kind = Kind::Measure;
    o.measured = std::move(qs);
    return o;
  }
};

std::set<int> touched_qubits(const StateOp& op);

struct Param {
  std::string name;
  std::optional<double> lo;
  std::optional<double> hi;
  bool hi_open = false;
};

/// Parameter reference as it appears in terms.
RealTerm param(const std::string& name);
std::string param_var(const std::string& name);

struct InitSpec {
  enum class Kind { FullHilbert, BasisSet, Concrete, Joint };
  Kind kind = Kind::FullHilbert;
  std::vector<int> qubits;  // one entry unless Joint
  std::vector<int> basis;  // BasisSet: subset of {0, 1}
  std::vector<std::complex<double>> amps;  // Concrete (2) or Joint (2^k)

  static InitSpec full(int q);
  static InitSpec basis_set(int q, std::vector<int> bits);
  static InitSpec concrete(int q, std::complex<double> a, std::complex<double> b);
  static InitSpec joint(std::vector<int> qs, std::vector<std::complex<double>> amps);
  static InitSpec bell(int a, int b);
};

/// (a, b) times the unit phase that makes a real and nonnegative; b is made
/// real and nonnegative when a is zero.
std::pair<std::complex<double>, std::complex<double>> strip_phase(std::complex<double> a, std::complex<double> b);

class ModelError : public std::runtime_error {
 public:
  enum class Code { IndexOutOfRange, DuplicateTarget, UnboundParameter, BadInitial, BadMatrix, BadMeasure };
  ModelError(Code c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct ProgramModel {
  int n_qubits = 0;
  std::vector<StateOp> ops;
  std::vector<Param> params;
  std::vector<InitSpec> inits;  // one per qubit or joint group, sorted by first qubit
  std::vector<int> init_of;  // qubit -> index into inits

  int state_count() const { return static_cast<int>(ops.size()) + 1; }
  int measured_count() const;
  /// Measured-qubit count of ops[0..op_index).
  int measured_before(int op_index) const;
};

ProgramModel build_program(int n_qubits, std::vector<StateOp> ops, std::vector<Param> params,
                           std::vector<InitSpec> inits);

/// All 2^K outcome strings in lexicographic order; {""} when nothing is measured.
std::vector<std::string> branch_labels(const ProgramModel& p);
std::vector<std::string> branch_labels(int measured);

/// Line-oriented circuit text:
///   qubits 3
///   param theta 0 1 open
///   init 0 full | init 0 basis 0 1 | init 0 ket are aim bre bim | init 1 2 bell
///   h 0 | x 2 ctrl 0 1 | rx 0 (* 0.5 pi) | rk 2 1 ctrl 0 | cx 0 1 | measure 0 1
/// `#` starts a comment.
ProgramModel parse_qpm(std::string_view text);
std::string to_qpm(const ProgramModel& p);

}  // namespace qvsmt
