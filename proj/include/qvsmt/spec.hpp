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
#include <string>
#include <string_view>
#include <vector>

#include "qvsmt/encoder.hpp"
#include "qvsmt/expr.hpp"
#include "qvsmt/qpm.hpp"
#include "qvsmt/view.hpp"

// Specifications over program states. Symbol references live inside
// RealTerms as variables named "$role.state.target.branch"; branch "*"
// stands for every measurement outcome.
namespace qvsmt {

inline constexpr const char* kAllBranches = "*";

/// Reference term for a single-qubit component or a state-vector entry.
RealTerm ref(Role role, int state, int target, const std::string& branch = kAllBranches);

struct SymRef {
  Role role = Role::Alpha;
  int state = 0;
  int target = 0;  // qubit, or amplitude index for AmpRe/AmpIm
  std::string branch;
};

std::optional<SymRef> parse_ref(const std::string& var);

/// Operand of a qubit equality: a program qubit, a constant ket, or the
/// amplitude-swapped (X-applied) version of a program qubit.
struct QubitTarget {
  enum class Kind { Ref, Ket, Flip };
  Kind kind = Kind::Ref;
  int state = 0;
  int qubit = 0;
  std::string branch = kAllBranches;
  std::complex<double> a{1.0, 0.0};
  std::complex<double> b{0.0, 0.0};

  static QubitTarget q(int state, int qubit, std::string branch = kAllBranches);
  static QubitTarget ket(std::complex<double> a, std::complex<double> b);
  static QubitTarget flip(int state, int qubit, std::string branch = kAllBranches);
};

enum class SKind { True, False, Cmp, And, Or, Not, Implies, Ite, QubitEq, QubitNeq };

struct SpecNode;

class SpecFormula {
 public:
  SpecFormula();  // true

  static SpecFormula truth();
  static SpecFormula falsity();
  static SpecFormula cmp(Rel rel, RealTerm lhs, RealTerm rhs);
  static SpecFormula all(std::vector<SpecFormula> kids);
  static SpecFormula any(std::vector<SpecFormula> kids);
  static SpecFormula negation(SpecFormula f);
  static SpecFormula implies(SpecFormula a, SpecFormula b);
  static SpecFormula ite(SpecFormula c, SpecFormula a, SpecFormula b);
  /// Same single-qubit state up to a scalar factor.
  static SpecFormula qubit_eq(QubitTarget a, QubitTarget b);

  const SpecNode& node() const { return *n_; }
  SKind kind() const;

 private:
  explicit SpecFormula(std::shared_ptr<const SpecNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const SpecNode> n_;
  friend SpecFormula make_spec(SpecNode n);
};

struct SpecNode {
  SKind kind = SKind::True;
  Rel rel = Rel::Eq;
  RealTerm lhs;
  RealTerm rhs;
  std::vector<SpecFormula> kids;
  QubitTarget qa;
  QubitTarget qb;
  double eps = 0.0;  // QubitNeq margin
};

SpecFormula make_spec(SpecNode n);

/// Negation pushed to atoms. Atoms negate to complements shifted by eps, so
/// a negated equality a = b asks for |a - b| > eps; guards of implications
/// and ite are kept as they are. negate(f) implies not f. With eps = 0
/// negation is an involution up to logical equivalence; with eps > 0 the
/// double negation is f with every atom widened by 2 eps.
SpecFormula negate(const SpecFormula& f, double eps);

/// Replaces "*" branches per top-level conjunct by a conjunction over labels.
SpecFormula expand_branches(const SpecFormula& f, const std::vector<std::string>& labels);

/// Constraint over the view's symbols. Branch wildcards must be expanded.
Constraint translate(const SpecFormula& f, const StateView& view);

/// 0 when f holds at the (closed) view; otherwise how far it is from holding.
/// Guards are evaluated exactly.
double violation(const SpecFormula& f, const StateView& view);

std::string to_text(const SpecFormula& f);

struct StructuralRule {
  enum class Kind { ForbidJointTouch };
  Kind kind = Kind::ForbidJointTouch;
  std::vector<int> a;
  std::vector<int> b;
  int before = -1;  // op index; -1 = first measurement (or end)
};

struct StructuralViolation {
  std::size_t rule = 0;
  int op_index = 0;
  std::string message;
};

std::optional<StructuralViolation> check_structural(const std::vector<StructuralRule>& rules, const ProgramModel& p);

struct Spec {
  SpecFormula formula;
  std::vector<StructuralRule> rules;
};

/// Top-level forms: formulas (conjoined) and (forbid-joint (A...) (B...) measure|N).
/// Terms: numbers, pi, + - * / sin cos ^, (alpha s q [b]), (alpha_im ...),
/// (beta_re ...), (beta_im ...), (phi ...), (theta ...), (amp_re s i [b]),
/// (amp_im s i [b]), (param name). Qubit equality: (qeq Q Q) with
/// Q = (q s j [b]) | (ket ar ai br bi) | (flip (q s j [b])). Omitted branch = *.
Spec parse_qspec(std::string_view text);

struct Query {
  EncodingResult enc;
  SpecFormula expanded;
  Constraint negated;

  SmtScript script() const;
};

/// encode(p) together with the negated, branch-expanded spec.
Query assemble_query(const ProgramModel& p, const SpecFormula& f, const EncodeOptions& opts, double eps);

}  // namespace qvsmt
