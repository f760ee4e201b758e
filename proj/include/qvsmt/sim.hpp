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
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvsmt/expr.hpp"
#include "qvsmt/gates.hpp"
#include "qvsmt/qpm.hpp"
#include "qvsmt/spec.hpp"
#include "qvsmt/view.hpp"

// Dense state-vector simulator used as the reference oracle. Qubit 0 is the
// most significant bit of the amplitude index.
namespace qvsmt {

using Amp = std::complex<double>;

struct DenseState {
  int n_qubits = 0;
  std::vector<Amp> amps;

  static DenseState zero(int n);
  double norm2() const;
};

// Kernels. The serial versions are the reference; the parallel ones split
// the outer loop with OpenMP and must agree bit for bit on the same input.
namespace kernels {

/// u (dim 2^k, row-major) on the listed qubits, first qubit most significant.
void apply_matrix_serial(std::vector<Amp>& psi, int n, const CMatrix& u, const std::vector<int>& qubits);
void apply_matrix_parallel(std::vector<Amp>& psi, int n, const CMatrix& u, const std::vector<int>& qubits);

/// Zeroes amplitudes whose qubit bits differ from `bits`; returns the kept mass.
double project_serial(std::vector<Amp>& psi, int n, const std::vector<int>& qubits, const std::vector<int>& bits);
double project_parallel(std::vector<Amp>& psi, int n, const std::vector<int>& qubits, const std::vector<int>& bits);

double norm2_serial(const std::vector<Amp>& psi);
double norm2_parallel(const std::vector<Amp>& psi);

}  // namespace kernels

class ZeroProbabilityBranch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimOptions {
  bool parallel = true;
  Valuation params;  // keyed by param_var(name)
};

struct RunResult {
  std::vector<DenseState> states;  // one per state index, along the chosen branch
  double probability = 1.0;
};

/// Runs p on a normalised 2^n input, following branch_choice at measurements
/// and renormalising. Throws ZeroProbabilityBranch when p(branch) < 1e-12.
RunResult run_concrete(const ProgramModel& p, const std::vector<Amp>& input, const std::string& branch_choice,
                       const SimOptions& opts = {});

/// Inputs admitted by the initial valuation: every basis choice of BasisSet
/// qubits, the fixed states elsewhere. Throws std::invalid_argument when a
/// qubit ranges over the full Hilbert space.
std::vector<std::vector<Amp>> enumerate_inputs(const ProgramModel& p);
/// One admissible input; FullHilbert qubits get a uniformly random state.
std::vector<Amp> sample_input(const ProgramModel& p, std::mt19937_64& rng);
/// Product state from per-qubit amplitude pairs, phases stripped as in the encoder.
std::vector<Amp> product_state(const std::vector<std::pair<Amp, Amp>>& qubits);

/// Constant view of every branch of one run. Branches of probability zero hold
/// zero vectors.
class SimView : public StateView {
 public:
  SimView(const ProgramModel& p, const std::vector<Amp>& input, const SimOptions& opts = {});

  int n_qubits() const override { return n_; }
  int state_count() const override { return static_cast<int>(measured_before_.size()); }
  std::vector<std::string> branch_labels() const override { return labels_; }
  std::vector<std::pair<ComplexTerm, ComplexTerm>> qubit_pairs(int state, int qubit,
                                                               const std::string& branch) const override;
  ComplexTerm amplitude(int state, std::size_t index, const std::string& branch) const override;
  /// Needs the qubit to be unentangled; the phase is fixed so alpha is real
  /// and nonnegative.
  RealTerm component(int state, int qubit, const std::string& branch, Role role) const override;
  RealTerm param(const std::string& name) const override;

  const DenseState& state(int s, const std::string& branch) const;
  double probability(const std::string& branch) const { return prob_.at(branch); }

 private:
  int n_ = 0;
  std::vector<int> measured_before_;
  std::vector<std::string> labels_;
  std::map<std::string, std::vector<DenseState>> runs_;
  std::map<std::string, double> prob_;
  Valuation params_;
};

/// Amplitudes (x, y) of an unentangled qubit with x real and nonnegative, or
/// nullopt when the qubit is entangled (tolerance relative to the norm).
std::optional<std::pair<Amp, Amp>> reduced_qubit(const DenseState& s, int qubit, double tol = 1e-9);

struct EnumResult {
  bool pass = true;
  std::size_t cases = 0;
  std::optional<std::size_t> failing_input;  // index into the input list
  double worst = 0.0;  // largest violation seen
};

/// Evaluates f on every input and branch; passes when every violation is at
/// most tol.
EnumResult enumerate_verify(const ProgramModel& p, const SpecFormula& f, const std::vector<std::vector<Amp>>& inputs,
                            const SimOptions& opts = {}, double tol = 1e-7);

}  // namespace qvsmt
