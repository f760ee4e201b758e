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

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qvsmt/expr.hpp"
#include "qvsmt/qpm.hpp"

// Gate catalog: direct mappings on single-qubit amplitude pairs and the
// equivalent matrices.
namespace qvsmt {

struct QubitAmp {
  ComplexTerm alpha;
  ComplexTerm beta;
};

/// Gate as a function on the amplitude pairs of its target qubits. Controls,
/// when present, must be computational-basis states; the mapping is applied
/// when all of them are |1> and is the identity otherwise.
struct DirectMapping {
  int n_controls = 0;
  int n_targets = 1;
  bool basis_control_only = false;
  std::function<std::vector<QubitAmp>(const std::vector<QubitAmp>&)> apply;
};

std::optional<DirectMapping> mapping_for(const GateSpec& g);

/// Square matrix over g.qubits(); the first qubit is the most significant
/// index bit.
struct GateMatrix {
  std::size_t dim = 0;
  std::vector<ComplexTerm> e;  // row-major

  const ComplexTerm& at(std::size_t r, std::size_t c) const { return e[r * dim + c]; }
  static GateMatrix identity(std::size_t dim);
};

GateMatrix matrix_for(const GateSpec& g);

/// M0 = diag(1, 0), M1 = diag(0, 1).
std::pair<GateMatrix, GateMatrix> measurement_matrices();

/// e^{i*angle}, folded to constants when the angle is closed.
ComplexTerm cis(const RealTerm& angle);
/// 2*pi / 2^k
RealTerm rk_angle(const RealTerm& k);

using CMatrix = std::vector<std::complex<double>>;
using CQubit = std::array<std::complex<double>, 2>;

CMatrix numeric(const GateMatrix& m, const Valuation& v = {});
bool is_unitary(const CMatrix& u, std::size_t dim, double tol = 1e-9);

/// Mapping applied to concrete qubits (controls first). Throws
/// std::invalid_argument when a control is not a basis state.
std::vector<CQubit> apply_numeric(const DirectMapping& m, const std::vector<CQubit>& qubits, const Valuation& v = {});

}  // namespace qvsmt
