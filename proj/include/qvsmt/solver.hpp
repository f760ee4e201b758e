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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qvsmt/encoder.hpp"
#include "qvsmt/interval.hpp"
#include "qvsmt/qpm.hpp"
#include "qvsmt/sim.hpp"
#include "qvsmt/spec.hpp"

// External solver driver, counterexample extraction and the verification loop.
namespace qvsmt {

enum class SolverProfile {
  DReal,   // "unsat" / "delta-sat with delta = D" and `name : [lo, hi]` lines
  SmtLib,  // "sat" / "unsat" followed by a (get-model) response
};

struct SolverConfig {
  std::string solver_path;  // empty: default_solver_path()
  SolverProfile profile = SolverProfile::DReal;
  double delta = 1e-4;
  double timeout_s = 600.0;
  Mode mode = Mode::Exact;
  bool box_keep_eq1 = false;
  double eps = 1e-3;  // margin of negated spec atoms
  std::vector<std::string> extra_flags;
  std::string dump_smt;  // write the emitted script here when set
};

/// $QVSMT_SOLVER, else the bundled qsolve, else "dreal" on PATH.
std::string default_solver_path();
/// True when `path --version` runs and exits 0.
bool solver_available(const std::string& path);

enum class VerdictKind { Unsat, DeltaSat, Timeout, Unknown, SolverError };
const char* verdict_name(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::SolverError;
  std::vector<std::pair<std::string, Interval>> model;
  std::string text;  // raw output, or the error message
  double wall_ms = 0.0;

  std::optional<Interval> value(const std::string& name) const;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingSymbol : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses solver stdout. Unparseable text gives a SolverError verdict.
Verdict parse_solver_output(const std::string& out, SolverProfile profile);

/// Writes the script to a temp file, runs the solver and parses its answer.
Verdict run_solver(const std::string& smt, const SolverConfig& cfg);
/// Script with one assertion per top-level conjunct of c.
Verdict run(const Constraint& c, const SolverConfig& cfg);

struct QubitValue {
  int state = 0;
  int qubit = 0;
  std::string branch;
  std::complex<double> alpha;
  std::complex<double> beta;
  double residual = 0.0;  // | |alpha|^2 + |beta|^2 - 1 |
};

struct Counterexample {
  std::vector<QubitValue> inputs;  // state 0 blocks
  std::vector<std::pair<std::vector<int>, std::vector<std::complex<double>>>> input_vectors;  // joint groups
  std::vector<QubitValue> finals;  // last state, every branch, unentangled qubits
  std::map<std::string, double> params;  // by parameter name
  bool midpoint = true;  // values are interval midpoints
  double max_residual = 0.0;  // over the inputs
  bool outside_hilbert = false;  // max_residual > 10 delta

  /// Normalised 2^n input vector for the simulator.
  std::vector<Amp> input_state(const ProgramModel& p) const;
  Valuation param_valuation() const;
};

Counterexample extract_counterexample(const Verdict& v, const EncodingResult& enc, double delta);

/// Largest spec violation when the counterexample input is run through the
/// simulator; > 0 means the simulator confirms it.
double replay(const ProgramModel& p, const SpecFormula& f, const Counterexample& c);

enum class Outcome { Verified, Refuted, SpuriousCandidate, StructuralViolation, Timeout, Unknown, Error };
const char* outcome_name(Outcome o);

struct Attempt {
  Mode mode = Mode::Exact;
  Verdict verdict;
  std::optional<Counterexample> counterexample;
};

struct VerifyReport {
  Outcome outcome = Outcome::Error;
  Mode mode = Mode::Exact;  // mode of the deciding attempt
  double delta = 0.0;
  double wall_ms = 0.0;
  std::vector<Attempt> attempts;
  std::optional<Counterexample> counterexample;
  std::optional<StructuralViolation> structural;
  std::string message;
};

/// Structural rules first, then the query. A Box witness outside the Hilbert
/// space is a SpuriousCandidate and triggers an Exact re-run, whose result is
/// reported.
VerifyReport verify(const ProgramModel& p, const Spec& spec, const SolverConfig& cfg);

nlohmann::json to_json(const Counterexample& c);
/// {verdict, delta, mode, wall_time_ms, counterexample?, ...}
nlohmann::json to_json(const VerifyReport& r);

int exit_code(Outcome o);

}  // namespace qvsmt
