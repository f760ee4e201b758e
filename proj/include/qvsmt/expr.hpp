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
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qvsmt {

enum class TermOp : uint8_t { Var, Const, Pi, Add, Sub, Mul, Neg, Div, Sin, Cos, Pow };

class RealTerm;

struct TermNode {
  TermOp op = TermOp::Const;
  double value = 0.0;
  std::string name;
  std::vector<RealTerm> args;
};

/// Immutable, shared real-valued term. Builders fold constant operands and
/// drop additive and multiplicative identities.
class RealTerm {
 public:
  RealTerm();
  RealTerm(double v);  // NOLINT: numeric literals read naturally in formulas

  static RealTerm var(std::string name);
  static RealTerm constant(double v);
  static RealTerm pi();
  static RealTerm make(TermOp op, std::vector<RealTerm> args);

  TermOp op() const { return n_->op; }
  double value() const { return n_->value; }
  const std::string& name() const { return n_->name; }
  const std::vector<RealTerm>& args() const { return n_->args; }
  const TermNode* node() const { return n_.get(); }

  bool is_const() const { return n_->op == TermOp::Const; }
  bool is_const(double v) const { return is_const() && n_->value == v; }
  bool is_var() const { return n_->op == TermOp::Var; }

 private:
  explicit RealTerm(std::shared_ptr<const TermNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const TermNode> n_;
};

RealTerm operator+(const RealTerm& a, const RealTerm& b);
RealTerm operator-(const RealTerm& a, const RealTerm& b);
RealTerm operator*(const RealTerm& a, const RealTerm& b);
RealTerm operator/(const RealTerm& a, const RealTerm& b);
RealTerm operator-(const RealTerm& a);
RealTerm sin_t(const RealTerm& a);
RealTerm cos_t(const RealTerm& a);
RealTerm pow_t(const RealTerm& base, const RealTerm& exponent);

/// Pair of real terms standing for re + i*im.
struct ComplexTerm {
  RealTerm re;
  RealTerm im;

  ComplexTerm() = default;
  ComplexTerm(RealTerm r, RealTerm i) : re(std::move(r)), im(std::move(i)) {}
  static ComplexTerm from(std::complex<double> c) { return {c.real(), c.imag()}; }
  /// e^{i*angle}
  static ComplexTerm phase(const RealTerm& angle) { return {cos_t(angle), sin_t(angle)}; }

  ComplexTerm conj() const { return {re, -im}; }
  /// |z|^2
  RealTerm norm2() const { return re * re + im * im; }
  bool is_zero() const { return re.is_const(0.0) && im.is_const(0.0); }
};

ComplexTerm operator+(const ComplexTerm& a, const ComplexTerm& b);
ComplexTerm operator-(const ComplexTerm& a, const ComplexTerm& b);
ComplexTerm operator-(const ComplexTerm& a);
ComplexTerm operator*(const ComplexTerm& a, const ComplexTerm& b);
ComplexTerm operator*(const RealTerm& s, const ComplexTerm& a);

enum class Rel : uint8_t { Eq, Le, Lt, Ge, Gt };
enum class CKind : uint8_t { True, False, Atom, And, Or, Not, Implies };

class Constraint;

struct ConstraintNode {
  CKind kind = CKind::True;
  Rel rel = Rel::Eq;
  RealTerm lhs;
  RealTerm rhs;
  std::vector<Constraint> kids;
};

class Constraint {
 public:
  Constraint();  // true

  static Constraint truth();
  static Constraint falsity();
  static Constraint atom(Rel rel, RealTerm lhs, RealTerm rhs);
  static Constraint eq(RealTerm l, RealTerm r) { return atom(Rel::Eq, std::move(l), std::move(r)); }
  static Constraint le(RealTerm l, RealTerm r) { return atom(Rel::Le, std::move(l), std::move(r)); }
  static Constraint lt(RealTerm l, RealTerm r) { return atom(Rel::Lt, std::move(l), std::move(r)); }
  static Constraint ge(RealTerm l, RealTerm r) { return atom(Rel::Ge, std::move(l), std::move(r)); }
  static Constraint gt(RealTerm l, RealTerm r) { return atom(Rel::Gt, std::move(l), std::move(r)); }
  static Constraint conj(std::vector<Constraint> kids);
  static Constraint disj(std::vector<Constraint> kids);
  static Constraint negation(Constraint c);
  static Constraint implies(Constraint a, Constraint b);

  CKind kind() const { return n_->kind; }
  Rel rel() const { return n_->rel; }
  const RealTerm& lhs() const { return n_->lhs; }
  const RealTerm& rhs() const { return n_->rhs; }
  const std::vector<Constraint>& kids() const { return n_->kids; }
  const ConstraintNode* node() const { return n_.get(); }

 private:
  explicit Constraint(std::shared_ptr<const ConstraintNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const ConstraintNode> n_;
};

/// Component-wise equality of complex terms as two real atoms.
std::vector<Constraint> complex_eq(const ComplexTerm& a, const ComplexTerm& b);

using Valuation = std::unordered_map<std::string, double>;

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double evaluate(const RealTerm& t, const Valuation& v);
double evaluate(const RealTerm& t, const std::function<double(const std::string&)>& lookup);
std::complex<double> evaluate(const ComplexTerm& t, const Valuation& v);

/// Truth of c at v; equalities and inequalities are relaxed by tol.
bool holds(const Constraint& c, const Valuation& v, double tol = 0.0);

/// Constant subtrees are folded; sin/cos are folded only at multiples of pi/2.
RealTerm fold_constants(const RealTerm& t);
Constraint fold_constants(const Constraint& c);

/// Substitute variables by name; unmapped variables are kept.
RealTerm substitute(const RealTerm& t, const std::function<std::optional<RealTerm>(const std::string&)>& f);

void collect_vars(const RealTerm& t, std::set<std::string>& out);
void collect_vars(const Constraint& c, std::set<std::string>& out);
bool contains_trig(const RealTerm& t);
bool contains_trig(const Constraint& c);
std::size_t atom_count(const Constraint& c);

/// Push negations to atoms (atom negation is the exact complement).
Constraint to_nnf(const Constraint& c);

struct SmtOptions {
  bool pi_symbol = false;  // emit `pi` instead of a literal
};

std::string format_decimal(double v);
std::string to_smtlib(const RealTerm& t, const SmtOptions& opts = {});
std::string to_smtlib(const Constraint& c, const SmtOptions& opts = {});

struct SmtSection {
  std::string name;
  std::vector<Constraint> assertions;
};

struct SmtScript {
  std::string logic = "QF_NRA";
  std::vector<std::string> decls;
  std::vector<SmtSection> sections;
};

class UndeclaredVariable : public std::invalid_argument {
 public:
  explicit UndeclaredVariable(const std::string& name)
      : std::invalid_argument("undeclared variable " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// SMT-LIB2 text: set-logic, declare-fun per variable, one assert per
/// constraint under `; section:` comments, then check-sat and exit.
/// Throws UndeclaredVariable when an assertion uses a name not in decls.
std::string emit(const SmtScript& s, const SmtOptions& opts = {});

}  // namespace qvsmt
