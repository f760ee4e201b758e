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

#include "qvsmt/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qvsmt {

namespace {

std::shared_ptr<TermNode> new_node(TermOp op) {
  auto n = std::make_shared<TermNode>();
  n->op = op;
  return n;
}

}  // namespace

RealTerm::RealTerm() : RealTerm(0.0) {}

RealTerm::RealTerm(double v) {
  auto n = new_node(TermOp::Const);
  n->value = v;
  n_ = std::move(n);
}

RealTerm RealTerm::var(std::string name) {
  auto n = new_node(TermOp::Var);
  n->name = std::move(name);
  return RealTerm(std::shared_ptr<const TermNode>(std::move(n)));
}

RealTerm RealTerm::constant(double v) { return RealTerm(v); }

RealTerm RealTerm::pi() { return RealTerm(std::shared_ptr<const TermNode>(new_node(TermOp::Pi))); }

RealTerm RealTerm::make(TermOp op, std::vector<RealTerm> args) {
  auto n = new_node(op);
  n->args = std::move(args);
  return RealTerm(std::shared_ptr<const TermNode>(std::move(n)));
}

RealTerm operator+(const RealTerm& a, const RealTerm& b) {
  if (a.is_const() && b.is_const()) return a.value() + b.value();
  if (a.is_const(0.0)) return b;
  if (b.is_const(0.0)) return a;
  return RealTerm::make(TermOp::Add, {a, b});
}

RealTerm operator-(const RealTerm& a, const RealTerm& b) {
  if (a.is_const() && b.is_const()) return a.value() - b.value();
  if (b.is_const(0.0)) return a;
  if (a.is_const(0.0)) return -b;
  return RealTerm::make(TermOp::Sub, {a, b});
}

RealTerm operator*(const RealTerm& a, const RealTerm& b) {
  if (a.is_const() && b.is_const()) return a.value() * b.value();
  if (a.is_const(0.0) || b.is_const(0.0)) return 0.0;
  if (a.is_const(1.0)) return b;
  if (b.is_const(1.0)) return a;
  if (a.is_const(-1.0)) return -b;
  if (b.is_const(-1.0)) return -a;
  return RealTerm::make(TermOp::Mul, {a, b});
}

RealTerm operator/(const RealTerm& a, const RealTerm& b) {
  if (b.is_const(0.0)) throw EvalError("division by constant zero");
  if (a.is_const() && b.is_const()) return a.value() / b.value();
  if (b.is_const(1.0)) return a;
  if (a.is_const(0.0)) return 0.0;
  return RealTerm::make(TermOp::Div, {a, b});
}

RealTerm operator-(const RealTerm& a) {
  if (a.is_const()) return -a.value();
  if (a.op() == TermOp::Neg) return a.args()[0];
  return RealTerm::make(TermOp::Neg, {a});
}

RealTerm sin_t(const RealTerm& a) { return RealTerm::make(TermOp::Sin, {a}); }
RealTerm cos_t(const RealTerm& a) { return RealTerm::make(TermOp::Cos, {a}); }
RealTerm pow_t(const RealTerm& base, const RealTerm& exponent) {
  if (exponent.is_const(1.0)) return base;
  if (exponent.is_const(0.0)) return 1.0;
  return RealTerm::make(TermOp::Pow, {base, exponent});
}

ComplexTerm operator+(const ComplexTerm& a, const ComplexTerm& b) { return {a.re + b.re, a.im + b.im}; }
ComplexTerm operator-(const ComplexTerm& a, const ComplexTerm& b) { return {a.re - b.re, a.im - b.im}; }
ComplexTerm operator-(const ComplexTerm& a) { return {-a.re, -a.im}; }
ComplexTerm operator*(const ComplexTerm& a, const ComplexTerm& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
ComplexTerm operator*(const RealTerm& s, const ComplexTerm& a) { return {s * a.re, s * a.im}; }

Constraint::Constraint() : n_(std::make_shared<ConstraintNode>()) {}

Constraint Constraint::truth() { return Constraint(); }

Constraint Constraint::falsity() {
  auto n = std::make_shared<ConstraintNode>();
  n->kind = CKind::False;
  return Constraint(std::shared_ptr<const ConstraintNode>(std::move(n)));
}

Constraint Constraint::atom(Rel rel, RealTerm lhs, RealTerm rhs) {
  auto n = std::make_shared<ConstraintNode>();
  n->kind = CKind::Atom;
  n->rel = rel;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Constraint(std::shared_ptr<const ConstraintNode>(std::move(n)));
}

Constraint Constraint::conj(std::vector<Constraint> kids) {
  std::vector<Constraint> keep;
  for (auto& k : kids) {
    if (k.kind() == CKind::True) continue;
    if (k.kind() == CKind::False) return falsity();
    keep.push_back(std::move(k));
  }
  if (keep.empty()) return truth();
  if (keep.size() == 1) return keep[0];
  auto n = std::make_shared<ConstraintNode>();
  n->kind = CKind::And;
  n->kids = std::move(keep);
  return Constraint(std::shared_ptr<const ConstraintNode>(std::move(n)));
}

Constraint Constraint::disj(std::vector<Constraint> kids) {
  std::vector<Constraint> keep;
  for (auto& k : kids) {
    if (k.kind() == CKind::False) continue;
    if (k.kind() == CKind::True) return truth();
    keep.push_back(std::move(k));
  }
  if (keep.empty()) return falsity();
  if (keep.size() == 1) return keep[0];
  auto n = std::make_shared<ConstraintNode>();
  n->kind = CKind::Or;
  n->kids = std::move(keep);
  return Constraint(std::shared_ptr<const ConstraintNode>(std::move(n)));
}

Constraint Constraint::negation(Constraint c) {
  if (c.kind() == CKind::True) return falsity();
  if (c.kind() == CKind::False) return truth();
  auto n = std::make_shared<ConstraintNode>();
  n->kind = CKind::Not;
  n->kids = {std::move(c)};
  return Constraint(std::shared_ptr<const ConstraintNode>(std::move(n)));
}

Constraint Constraint::implies(Constraint a, Constraint b) {
  if (a.kind() == CKind::True) return b;
  if (a.kind() == CKind::False) return truth();
  auto n = std::make_shared<ConstraintNode>();
  n->kind = CKind::Implies;
  n->kids = {std::move(a), std::move(b)};
  return Constraint(std::shared_ptr<const ConstraintNode>(std::move(n)));
}

std::vector<Constraint> complex_eq(const ComplexTerm& a, const ComplexTerm& b) {
  return {Constraint::eq(a.re, b.re), Constraint::eq(a.im, b.im)};
}

double evaluate(const RealTerm& t, const std::function<double(const std::string&)>& lookup) {
  const auto& a = t.args();
  switch (t.op()) {
    case TermOp::Var: return lookup(t.name());
    case TermOp::Const: return t.value();
    case TermOp::Pi: return std::numbers::pi;
    case TermOp::Add: return evaluate(a[0], lookup) + evaluate(a[1], lookup);
    case TermOp::Sub: return evaluate(a[0], lookup) - evaluate(a[1], lookup);
    case TermOp::Mul: return evaluate(a[0], lookup) * evaluate(a[1], lookup);
    case TermOp::Neg: return -evaluate(a[0], lookup);
    case TermOp::Div: return evaluate(a[0], lookup) / evaluate(a[1], lookup);
    case TermOp::Sin: return std::sin(evaluate(a[0], lookup));
    case TermOp::Cos: return std::cos(evaluate(a[0], lookup));
    case TermOp::Pow: return std::pow(evaluate(a[0], lookup), evaluate(a[1], lookup));
  }
  return 0.0;
}

double evaluate(const RealTerm& t, const Valuation& v) {
  return evaluate(t, [&](const std::string& name) {
    auto it = v.find(name);
    if (it == v.end()) throw EvalError("unbound variable " + name);
    return it->second;
  });
}

std::complex<double> evaluate(const ComplexTerm& t, const Valuation& v) {
  return {evaluate(t.re, v), evaluate(t.im, v)};
}

bool holds(const Constraint& c, const Valuation& v, double tol) {
  switch (c.kind()) {
    case CKind::True: return true;
    case CKind::False: return false;
    case CKind::Atom: {
      double d = evaluate(c.lhs(), v) - evaluate(c.rhs(), v);
      switch (c.rel()) {
        case Rel::Eq: return std::abs(d) <= tol;
        case Rel::Le: return d <= tol;
        case Rel::Lt: return d < tol || (tol == 0.0 && d < 0.0);
        case Rel::Ge: return d >= -tol;
        case Rel::Gt: return d > -tol || (tol == 0.0 && d > 0.0);
      }
      return false;
    }
    case CKind::And:
      for (const auto& k : c.kids())
        if (!holds(k, v, tol)) return false;
      return true;
    case CKind::Or:
      for (const auto& k : c.kids())
        if (holds(k, v, tol)) return true;
      return false;
    case CKind::Not: return holds(to_nnf(c), v, tol);
    case CKind::Implies: return holds(to_nnf(c), v, tol);
  }
  return false;
}

namespace {

// k such that t == k*pi, when t is syntactically a constant multiple of pi.
std::optional<double> pi_multiple(const RealTerm& t) {
  if (t.op() == TermOp::Pi) return 1.0;
  if (t.is_const(0.0)) return 0.0;
  if (t.op() == TermOp::Mul) {
    const auto& a = t.args();
    if (a[0].is_const()) {
      if (auto k = pi_multiple(a[1])) return a[0].value() * *k;
    }
    if (a[1].is_const()) {
      if (auto k = pi_multiple(a[0])) return a[1].value() * *k;
    }
  }
  if (t.op() == TermOp::Div && t.args()[1].is_const()) {
    if (auto k = pi_multiple(t.args()[0])) return *k / t.args()[1].value();
  }
  if (t.op() == TermOp::Neg) {
    if (auto k = pi_multiple(t.args()[0])) return -*k;
  }
  return std::nullopt;
}

std::optional<double> special_trig(TermOp op, const RealTerm& arg) {
  auto k = pi_multiple(arg);
  if (!k) return std::nullopt;
  double h = *k * 2.0;  // number of quarter turns
  if (h != std::floor(h)) return std::nullopt;
  long q = static_cast<long>(h) % 4;
  if (q < 0) q += 4;
  static const double sin_tab[4] = {0.0, 1.0, 0.0, -1.0};
  static const double cos_tab[4] = {1.0, 0.0, -1.0, 0.0};
  return op == TermOp::Sin ? sin_tab[q] : cos_tab[q];
}

}  // namespace

RealTerm fold_constants(const RealTerm& t) {
  const auto& a = t.args();
  switch (t.op()) {
    case TermOp::Var:
    case TermOp::Const:
    case TermOp::Pi: return t;
    case TermOp::Add: return fold_constants(a[0]) + fold_constants(a[1]);
    case TermOp::Sub: return fold_constants(a[0]) - fold_constants(a[1]);
    case TermOp::Mul: return fold_constants(a[0]) * fold_constants(a[1]);
    case TermOp::Neg: return -fold_constants(a[0]);
    case TermOp::Div: return fold_constants(a[0]) / fold_constants(a[1]);
    case TermOp::Sin:
    case TermOp::Cos: {
      RealTerm x = fold_constants(a[0]);
      if (auto v = special_trig(t.op(), x)) return *v;
      return t.op() == TermOp::Sin ? sin_t(x) : cos_t(x);
    }
    case TermOp::Pow: {
      RealTerm b = fold_constants(a[0]), e = fold_constants(a[1]);
      if (b.is_const() && e.is_const() && e.value() == std::floor(e.value()) &&
          std::abs(e.value()) <= 64 && (b.value() == 2.0 || b.value() == 1.0 || b.value() == 0.5))
        return std::pow(b.value(), e.value());
      return pow_t(b, e);
    }
  }
  return t;
}

Constraint fold_constants(const Constraint& c) {
  switch (c.kind()) {
    case CKind::True:
    case CKind::False: return c;
    case CKind::Atom: {
      RealTerm l = fold_constants(c.lhs()), r = fold_constants(c.rhs());
      if (l.is_const() && r.is_const()) {
        return holds(Constraint::atom(c.rel(), l, r), {}, 0.0) ? Constraint::truth() : Constraint::falsity();
      }
      return Constraint::atom(c.rel(), l, r);
    }
    case CKind::And: {
      std::vector<Constraint> k;
      for (const auto& x : c.kids()) k.push_back(fold_constants(x));
      return Constraint::conj(std::move(k));
    }
    case CKind::Or: {
      std::vector<Constraint> k;
      for (const auto& x : c.kids()) k.push_back(fold_constants(x));
      return Constraint::disj(std::move(k));
    }
    case CKind::Not: return Constraint::negation(fold_constants(c.kids()[0]));
    case CKind::Implies: return Constraint::implies(fold_constants(c.kids()[0]), fold_constants(c.kids()[1]));
  }
  return c;
}

RealTerm substitute(const RealTerm& t, const std::function<std::optional<RealTerm>(const std::string&)>& f) {
  if (t.op() == TermOp::Var) {
    if (auto r = f(t.name())) return *r;
    return t;
  }
  if (t.args().empty()) return t;
  std::vector<RealTerm> args;
  bool changed = false;
  for (const auto& x : t.args()) {
    args.push_back(substitute(x, f));
    changed |= args.back().node() != x.node();
  }
  if (!changed) return t;
  switch (t.op()) {
    case TermOp::Add: return args[0] + args[1];
    case TermOp::Sub: return args[0] - args[1];
    case TermOp::Mul: return args[0] * args[1];
    case TermOp::Neg: return -args[0];
    case TermOp::Div: return args[0] / args[1];
    case TermOp::Sin: return sin_t(args[0]);
    case TermOp::Cos: return cos_t(args[0]);
    case TermOp::Pow: return pow_t(args[0], args[1]);
    default: return t;
  }
}

void collect_vars(const RealTerm& t, std::set<std::string>& out) {
  if (t.op() == TermOp::Var) {
    out.insert(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

void collect_vars(const Constraint& c, std::set<std::string>& out) {
  if (c.kind() == CKind::Atom) {
    collect_vars(c.lhs(), out);
    collect_vars(c.rhs(), out);
  }
  for (const auto& k : c.kids()) collect_vars(k, out);
}

bool contains_trig(const RealTerm& t) {
  if (t.op() == TermOp::Sin || t.op() == TermOp::Cos) return true;
  for (const auto& a : t.args())
    if (contains_trig(a)) return true;
  return false;
}

bool contains_trig(const Constraint& c) {
  if (c.kind() == CKind::Atom) return contains_trig(c.lhs()) || contains_trig(c.rhs());
  for (const auto& k : c.kids())
    if (contains_trig(k)) return true;
  return false;
}

std::size_t atom_count(const Constraint& c) {
  if (c.kind() == CKind::Atom) return 1;
  std::size_t n = 0;
  for (const auto& k : c.kids()) n += atom_count(k);
  return n;
}

namespace {

Constraint nnf(const Constraint& c, bool neg) {
  switch (c.kind()) {
    case CKind::True: return neg ? Constraint::falsity() : c;
    case CKind::False: return neg ? Constraint::truth() : c;
    case CKind::Atom: {
      if (!neg) return c;
      const auto& l = c.lhs();
      const auto& r = c.rhs();
      switch (c.rel()) {
        case Rel::Eq: return Constraint::disj({Constraint::lt(l, r), Constraint::gt(l, r)});
        case Rel::Le: return Constraint::gt(l, r);
        case Rel::Lt: return Constraint::ge(l, r);
        case Rel::Ge: return Constraint::lt(l, r);
        case Rel::Gt: return Constraint::le(l, r);
      }
      return c;
    }
    case CKind::And:
    case CKind::Or: {
      std::vector<Constraint> k;
      for (const auto& x : c.kids()) k.push_back(nnf(x, neg));
      bool is_and = (c.kind() == CKind::And) != neg;
      return is_and ? Constraint::conj(std::move(k)) : Constraint::disj(std::move(k));
    }
    case CKind::Not: return nnf(c.kids()[0], !neg);
    case CKind::Implies: {
      if (neg) return Constraint::conj({nnf(c.kids()[0], false), nnf(c.kids()[1], true)});
      return Constraint::disj({nnf(c.kids()[0], true), nnf(c.kids()[1], false)});
    }
  }
  return c;
}

const char* rel_symbol(Rel r) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
  }
  return "=";
}

void emit_term(const RealTerm& t, const SmtOptions& o, std::string& out);

void emit_chain(const RealTerm& t, TermOp op, const SmtOptions& o, std::string& out) {
  if (t.op() == op) {
    emit_chain(t.args()[0], op, o, out);
    emit_chain(t.args()[1], op, o, out);
    return;
  }
  out += ' ';
  emit_term(t, o, out);
}

void emit_term(const RealTerm& t, const SmtOptions& o, std::string& out) {
  const auto& a = t.args();
  switch (t.op()) {
    case TermOp::Var: out += t.name(); return;
    case TermOp::Const:
      if (t.value() < 0 || (t.value() == 0.0 && std::signbit(t.value()))) {
        out += "(- ";
        out += format_decimal(-t.value());
        out += ')';
      } else {
        out += format_decimal(t.value());
      }
      return;
    case TermOp::Pi: out += o.pi_symbol ? "pi" : format_decimal(std::numbers::pi); return;
    case TermOp::Add:
    case TermOp::Mul:
      out += t.op() == TermOp::Add ? "(+" : "(*";
      emit_chain(t, t.op(), o, out);
      out += ')';
      return;
    case TermOp::Sub:
    case TermOp::Div:
    case TermOp::Pow: {
      out += t.op() == TermOp::Sub ? "(- " : t.op() == TermOp::Div ? "(/ " : "(^ ";
      emit_term(a[0], o, out);
      out += ' ';
      emit_term(a[1], o, out);
      out += ')';
      return;
    }
    case TermOp::Neg:
    case TermOp::Sin:
    case TermOp::Cos:
      out += t.op() == TermOp::Neg ? "(- " : t.op() == TermOp::Sin ? "(sin " : "(cos ";
      emit_term(a[0], o, out);
      out += ')';
      return;
  }
}

void emit_constraint(const Constraint& c, const SmtOptions& o, std::string& out) {
  switch (c.kind()) {
    case CKind::True: out += "true"; return;
    case CKind::False: out += "false"; return;
    case CKind::Atom:
      out += '(';
      out += rel_symbol(c.rel());
      out += ' ';
      emit_term(c.lhs(), o, out);
      out += ' ';
      emit_term(c.rhs(), o, out);
      out += ')';
      return;
    case CKind::And:
    case CKind::Or:
    case CKind::Not:
    case CKind::Implies:
      out += c.kind() == CKind::And ? "(and" : c.kind() == CKind::Or ? "(or" : c.kind() == CKind::Not ? "(not" : "(=>";
      for (const auto& k : c.kids()) {
        out += ' ';
        emit_constraint(k, o, out);
      }
      out += ')';
      return;
  }
}

}  // namespace

Constraint to_nnf(const Constraint& c) { return nnf(c, false); }

std::string format_decimal(double v) {
  if (!std::isfinite(v)) throw EvalError("non-finite constant");
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  std::string s(buf, res.ptr);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

std::string to_smtlib(const RealTerm& t, const SmtOptions& opts) {
  std::string out;
  emit_term(t, opts, out);
  return out;
}

std::string to_smtlib(const Constraint& c, const SmtOptions& opts) {
  std::string out;
  emit_constraint(c, opts, out);
  return out;
}

std::string emit(const SmtScript& s, const SmtOptions& opts) {
  std::set<std::string> used;
  for (const auto& sec : s.sections)
    for (const auto& a : sec.assertions) collect_vars(a, used);
  std::set<std::string> declared(s.decls.begin(), s.decls.end());
  for (const auto& v : used)
    if (!declared.count(v)) throw UndeclaredVariable(v);
  std::string out;
  out += "(set-logic " + s.logic + ")\n";
  for (const auto& d : s.decls) out += "(declare-fun " + d + " () Real)\n";
  for (const auto& sec : s.sections) {
    out += "; section: " + sec.name + "\n";
    for (const auto& a : sec.assertions) {
      out += "(assert ";
      emit_constraint(a, opts, out);
      out += ")\n";
    }
  }
  out += "(check-sat)\n(exit)\n";
  return out;
}

}  // namespace qvsmt
