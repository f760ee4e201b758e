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


#include "qvsmt/spec.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include "qvsmt/smtlib.hpp"

namespace qvsmt {

RealTerm ref(Role role, int state, int target, const std::string& branch) {
  return RealTerm::var("$" + std::string(role_name(role)) + "." + std::to_string(state) + "." + std::to_string(target) +
                       "." + branch);
}

std::optional<SymRef> parse_ref(const std::string& var) {
  if (var.empty() || var[0] != '$') return std::nullopt;
  std::vector<std::string> parts;
  std::size_t start = 1;
  for (int i = 0; i < 3; ++i) {
    std::size_t dot = var.find('.', start);
    if (dot == std::string::npos) return std::nullopt;
    parts.push_back(var.substr(start, dot - start));
    start = dot + 1;
  }
  SymRef r;
  if (!parse_role(parts[0], r.role)) return std::nullopt;
  r.state = std::stoi(parts[1]);
  r.target = std::stoi(parts[2]);
  r.branch = var.substr(start);
  return r;
}

QubitTarget QubitTarget::q(int state, int qubit, std::string branch) {
  QubitTarget t;
  t.state = state;
  t.qubit = qubit;
  t.branch = std::move(branch);
  return t;
}

QubitTarget QubitTarget::ket(std::complex<double> a, std::complex<double> b) {
  QubitTarget t;
  t.kind = Kind::Ket;
  t.a = a;
  t.b = b;
  return t;
}

QubitTarget QubitTarget::flip(int state, int qubit, std::string branch) {
  QubitTarget t = q(state, qubit, std::move(branch));
  t.kind = Kind::Flip;
  return t;
}

SpecFormula make_spec(SpecNode n) { return SpecFormula(std::make_shared<const SpecNode>(std::move(n))); }

SpecFormula::SpecFormula() : n_(std::make_shared<const SpecNode>()) {}
SKind SpecFormula::kind() const { return n_->kind; }

SpecFormula SpecFormula::truth() { return SpecFormula(); }

SpecFormula SpecFormula::falsity() {
  SpecNode n;
  n.kind = SKind::False;
  return make_spec(std::move(n));
}

SpecFormula SpecFormula::cmp(Rel rel, RealTerm lhs, RealTerm rhs) {
  SpecNode n;
  n.kind = SKind::Cmp;
  n.rel = rel;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return make_spec(std::move(n));
}

namespace {

SpecFormula nary(SKind k, std::vector<SpecFormula> kids) {
  const SKind unit = k == SKind::And ? SKind::True : SKind::False;
  const SKind zero = k == SKind::And ? SKind::False : SKind::True;
  std::vector<SpecFormula> flat;
  for (auto& c : kids) {
    if (c.kind() == unit) continue;
    if (c.kind() == zero) return c;
    if (c.kind() == k) {
      flat.insert(flat.end(), c.node().kids.begin(), c.node().kids.end());
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.empty()) return k == SKind::And ? SpecFormula::truth() : SpecFormula::falsity();
  if (flat.size() == 1) return flat[0];
  SpecNode n;
  n.kind = k;
  n.kids = std::move(flat);
  return make_spec(std::move(n));
}

}  // namespace

SpecFormula SpecFormula::all(std::vector<SpecFormula> kids) { return nary(SKind::And, std::move(kids)); }
SpecFormula SpecFormula::any(std::vector<SpecFormula> kids) { return nary(SKind::Or, std::move(kids)); }

SpecFormula SpecFormula::negation(SpecFormula f) {
  SpecNode n;
  n.kind = SKind::Not;
  n.kids = {std::move(f)};
  return make_spec(std::move(n));
}

SpecFormula SpecFormula::implies(SpecFormula a, SpecFormula b) {
  SpecNode n;
  n.kind = SKind::Implies;
  n.kids = {std::move(a), std::move(b)};
  return make_spec(std::move(n));
}

SpecFormula SpecFormula::ite(SpecFormula c, SpecFormula a, SpecFormula b) {
  SpecNode n;
  n.kind = SKind::Ite;
  n.kids = {std::move(c), std::move(a), std::move(b)};
  return make_spec(std::move(n));
}

SpecFormula SpecFormula::qubit_eq(QubitTarget a, QubitTarget b) {
  SpecNode n;
  n.kind = SKind::QubitEq;
  n.qa = std::move(a);
  n.qb = std::move(b);
  return make_spec(std::move(n));
}

SpecFormula negate(const SpecFormula& f, double eps) {
  const SpecNode& n = f.node();
  switch (n.kind) {
    case SKind::True: return SpecFormula::falsity();
    case SKind::False: return SpecFormula::truth();
    case SKind::Cmp: {
      const RealTerm& a = n.lhs;
      const RealTerm& b = n.rhs;
      switch (n.rel) {
        case Rel::Eq: {
          RealTerm d = a - b;
          return SpecFormula::any({SpecFormula::cmp(Rel::Lt, d, -eps), SpecFormula::cmp(Rel::Gt, d, eps)});
        }
        case Rel::Le: return SpecFormula::cmp(Rel::Gt, a, b + eps);
        case Rel::Lt: return SpecFormula::cmp(Rel::Ge, a, b + eps);
        case Rel::Ge: return SpecFormula::cmp(Rel::Lt, a, b - eps);
        case Rel::Gt: return SpecFormula::cmp(Rel::Le, a, b - eps);
      }
      break;
    }
    case SKind::And:
    case SKind::Or: {
      std::vector<SpecFormula> kids;
      for (const auto& k : n.kids) kids.push_back(negate(k, eps));
      return n.kind == SKind::And ? SpecFormula::any(std::move(kids)) : SpecFormula::all(std::move(kids));
    }
    case SKind::Not: return n.kids[0];
    case SKind::Implies: return SpecFormula::all({n.kids[0], negate(n.kids[1], eps)});
    case SKind::Ite: return SpecFormula::ite(n.kids[0], negate(n.kids[1], eps), negate(n.kids[2], eps));
    case SKind::QubitEq: {
      SpecNode m = n;
      m.kind = SKind::QubitNeq;
      m.eps = eps;
      return make_spec(std::move(m));
    }
    case SKind::QubitNeq: {
      SpecNode m = n;
      m.kind = SKind::QubitEq;
      m.eps = 0.0;
      return make_spec(std::move(m));
    }
  }
  return f;
}

// --- branch expansion --------------------------------------------------------

namespace {

bool term_has_wild(const RealTerm& t) {
  std::set<std::string> vs;
  collect_vars(t, vs);
  for (const auto& v : vs)
    if (auto r = parse_ref(v); r && r->branch == kAllBranches) return true;
  return false;
}

bool target_wild(const QubitTarget& t) { return t.kind != QubitTarget::Kind::Ket && t.branch == kAllBranches; }

bool has_wild(const SpecFormula& f) {
  const SpecNode& n = f.node();
  switch (n.kind) {
    case SKind::Cmp: return term_has_wild(n.lhs) || term_has_wild(n.rhs);
    case SKind::QubitEq:
    case SKind::QubitNeq: return target_wild(n.qa) || target_wild(n.qb);
    default:
      for (const auto& k : n.kids)
        if (has_wild(k)) return true;
      return false;
  }
}

RealTerm with_branch(const RealTerm& t, const std::string& label) {
  return substitute(t, [&](const std::string& v) -> std::optional<RealTerm> {
    auto r = parse_ref(v);
    if (!r || r->branch != kAllBranches) return std::nullopt;
    return ref(r->role, r->state, r->target, label);
  });
}

SpecFormula with_branch(const SpecFormula& f, const std::string& label) {
  SpecNode n = f.node();
  switch (n.kind) {
    case SKind::Cmp:
      n.lhs = with_branch(n.lhs, label);
      n.rhs = with_branch(n.rhs, label);
      break;
    case SKind::QubitEq:
    case SKind::QubitNeq:
      if (target_wild(n.qa)) n.qa.branch = label;
      if (target_wild(n.qb)) n.qb.branch = label;
      break;
    default:
      for (auto& k : n.kids) k = with_branch(k, label);
      break;
  }
  return make_spec(std::move(n));
}

void conjuncts(const SpecFormula& f, std::vector<SpecFormula>& out) {
  if (f.kind() == SKind::And) {
    for (const auto& k : f.node().kids) conjuncts(k, out);
  } else {
    out.push_back(f);
  }
}

}  // namespace

SpecFormula expand_branches(const SpecFormula& f, const std::vector<std::string>& labels) {
  std::vector<SpecFormula> cs, out;
  conjuncts(f, cs);
  for (const auto& c : cs) {
    if (!has_wild(c)) {
      out.push_back(c);
      continue;
    }
    std::vector<SpecFormula> per;
    for (const auto& l : labels) per.push_back(with_branch(c, l));
    out.push_back(SpecFormula::all(std::move(per)));
  }
  return SpecFormula::all(std::move(out));
}

// --- translation -------------------------------------------------------------

namespace {

RealTerm resolve(const RealTerm& t, const StateView& view) {
  return substitute(t, [&](const std::string& v) -> std::optional<RealTerm> {
    if (auto r = parse_ref(v)) {
      if (r->branch == kAllBranches) throw UnresolvedSymRef("branch wildcard left in " + v);
      if (r->role == Role::AmpRe || r->role == Role::AmpIm) {
        ComplexTerm a = view.amplitude(r->state, static_cast<std::size_t>(r->target), r->branch);
        return r->role == Role::AmpRe ? a.re : a.im;
      }
      return view.component(r->state, r->target, r->branch, r->role);
    }
    if (v.rfind("param_", 0) == 0) return view.param(v.substr(6));
    throw UnresolvedSymRef("unknown symbol " + v);
  });
}

using Pairs = std::vector<std::pair<ComplexTerm, ComplexTerm>>;

Pairs pairs_of(const QubitTarget& t, const StateView& view) {
  if (t.kind == QubitTarget::Kind::Ket) return {{ComplexTerm::from(t.a), ComplexTerm::from(t.b)}};
  if (t.branch == kAllBranches) throw UnresolvedSymRef("branch wildcard left in qubit equality");
  Pairs p = view.qubit_pairs(t.state, t.qubit, t.branch);
  if (t.kind == QubitTarget::Kind::Flip)
    for (auto& [a0, a1] : p) std::swap(a0, a1);
  return p;
}

// Constant pairs of an unentangled qubit reduce to the heaviest pair.
bool collapse(Pairs& p) {
  std::vector<std::pair<std::complex<double>, std::complex<double>>> v;
  for (const auto& [x, y] : p) {
    if (!x.re.is_const() || !x.im.is_const() || !y.re.is_const() || !y.im.is_const()) return false;
    v.emplace_back(std::complex<double>(x.re.value(), x.im.value()), std::complex<double>(y.re.value(), y.im.value()));
  }
  std::size_t best = 0;
  double mass = 0.0, total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::norm(v[i].first) + std::norm(v[i].second);
    total += m;
    if (m > mass) {
      mass = m;
      best = i;
    }
  }
  if (mass == 0.0) {
    p.resize(1);
    return true;
  }
  const auto [x, y] = v[best];
  for (const auto& [a0, a1] : v)
    if (std::abs(a0 * y - a1 * x) > 1e-9 * total) return false;
  p = {p[best]};
  return true;
}

// Cross products a0*y - a1*x; all vanish iff the qubit is (x, y) up to scale.
std::vector<ComplexTerm> crosses(const SpecNode& n, const StateView& view) {
  Pairs a = pairs_of(n.qa, view), b = pairs_of(n.qb, view);
  if (a.size() == 1 && b.size() > 1) std::swap(a, b);
  if (b.size() > 1 && !collapse(b) && collapse(a)) std::swap(a, b);
  if (b.size() != 1) throw UnresolvedSymRef("qubit equality needs an unentangled side");
  const auto& [x, y] = b[0];
  std::vector<ComplexTerm> out;
  for (const auto& [a0, a1] : a) out.push_back(a0 * y - a1 * x);
  return out;
}

}  // namespace

Constraint translate(const SpecFormula& f, const StateView& view) {
  const SpecNode& n = f.node();
  switch (n.kind) {
    case SKind::True: return Constraint::truth();
    case SKind::False: return Constraint::falsity();
    case SKind::Cmp: return Constraint::atom(n.rel, resolve(n.lhs, view), resolve(n.rhs, view));
    case SKind::And:
    case SKind::Or: {
      std::vector<Constraint> kids;
      for (const auto& k : n.kids) kids.push_back(translate(k, view));
      return n.kind == SKind::And ? Constraint::conj(std::move(kids)) : Constraint::disj(std::move(kids));
    }
    case SKind::Not: return Constraint::negation(translate(n.kids[0], view));
    case SKind::Implies: return Constraint::implies(translate(n.kids[0], view), translate(n.kids[1], view));
    case SKind::Ite: {
      Constraint c = translate(n.kids[0], view);
      return Constraint::conj({Constraint::implies(c, translate(n.kids[1], view)),
                               Constraint::implies(Constraint::negation(c), translate(n.kids[2], view))});
    }
    case SKind::QubitEq: {
      std::vector<Constraint> out;
      for (const auto& c : crosses(n, view)) {
        out.push_back(Constraint::eq(c.re, 0.0));
        out.push_back(Constraint::eq(c.im, 0.0));
      }
      return Constraint::conj(std::move(out));
    }
    case SKind::QubitNeq: {
      std::vector<Constraint> out;
      for (const auto& c : crosses(n, view))
        for (const RealTerm* t : {&c.re, &c.im}) {
          out.push_back(Constraint::lt(*t, -n.eps));
          out.push_back(Constraint::gt(*t, n.eps));
        }
      return Constraint::disj(std::move(out));
    }
  }
  return Constraint::truth();
}

double violation(const SpecFormula& f, const StateView& view) {
  const SpecNode& n = f.node();
  auto num = [&](const RealTerm& t) { return evaluate(resolve(t, view), Valuation{}); };
  switch (n.kind) {
    case SKind::True: return 0.0;
    case SKind::False: return 1.0;
    case SKind::Cmp: {
      double l = num(n.lhs), r = num(n.rhs);
      switch (n.rel) {
        case Rel::Eq: return std::abs(l - r);
        case Rel::Le:
        case Rel::Lt: return std::max(0.0, l - r);
        case Rel::Ge:
        case Rel::Gt: return std::max(0.0, r - l);
      }
      return 0.0;
    }
    case SKind::And: {
      double v = 0.0;
      for (const auto& k : n.kids) v = std::max(v, violation(k, view));
      return v;
    }
    case SKind::Or: {
      double v = INFINITY;
      for (const auto& k : n.kids) v = std::min(v, violation(k, view));
      return v;
    }
    case SKind::Not: return violation(negate(n.kids[0], 0.0), view);
    case SKind::Implies: return violation(n.kids[0], view) == 0.0 ? violation(n.kids[1], view) : 0.0;
    case SKind::Ite: return violation(n.kids[0], view) == 0.0 ? violation(n.kids[1], view) : violation(n.kids[2], view);
    case SKind::QubitEq:
    case SKind::QubitNeq: {
      double worst = 0.0;
      for (const auto& c : crosses(n, view)) {
        auto z = evaluate(c, Valuation{});
        worst = std::max({worst, std::abs(z.real()), std::abs(z.imag())});
      }
      return n.kind == SKind::QubitEq ? worst : std::max(0.0, n.eps - worst);
    }
  }
  return 0.0;
}

// --- text --------------------------------------------------------------------

namespace {

std::string term_text(const RealTerm& t) {
  static const std::regex re(R"(\$([a-z_]+)\.(\d+)\.(\d+)\.([01*]*))");
  std::string s = to_smtlib(t);
  s = std::regex_replace(s, re, "($1 $2 $3 $4)");
  return std::regex_replace(s, std::regex(R"( \))"), ")");
}

std::string target_text(const QubitTarget& t) {
  if (t.kind == QubitTarget::Kind::Ket)
    return "(ket " + format_decimal(t.a.real()) + " " + format_decimal(t.a.imag()) + " " + format_decimal(t.b.real()) +
           " " + format_decimal(t.b.imag()) + ")";
  std::string q = "(q " + std::to_string(t.state) + " " + std::to_string(t.qubit) + " " + t.branch + ")";
  return t.kind == QubitTarget::Kind::Flip ? "(flip " + q + ")" : q;
}

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
  }
  return "?";
}

}  // namespace

std::string to_text(const SpecFormula& f) {
  const SpecNode& n = f.node();
  auto kids = [&](const char* head) {
    std::string s = std::string("(") + head;
    for (const auto& k : n.kids) s += " " + to_text(k);
    return s + ")";
  };
  switch (n.kind) {
    case SKind::True: return "true";
    case SKind::False: return "false";
    case SKind::Cmp: return std::string("(") + rel_text(n.rel) + " " + term_text(n.lhs) + " " + term_text(n.rhs) + ")";
    case SKind::And: return kids("and");
    case SKind::Or: return kids("or");
    case SKind::Not: return kids("not");
    case SKind::Implies: return kids("=>");
    case SKind::Ite: return kids("ite");
    case SKind::QubitEq: return "(qeq " + target_text(n.qa) + " " + target_text(n.qb) + ")";
    case SKind::QubitNeq:
      return "(qneq " + format_decimal(n.eps) + " " + target_text(n.qa) + " " + target_text(n.qb) + ")";
  }
  return "?";
}

// --- structural rules --------------------------------------------------------

std::optional<StructuralViolation> check_structural(const std::vector<StructuralRule>& rules, const ProgramModel& p) {
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& rule = rules[r];
    int before = rule.before;
    if (before < 0) {
      before = static_cast<int>(p.ops.size());
      for (std::size_t i = 0; i < p.ops.size(); ++i)
        if (p.ops[i].kind == StateOp::Kind::Measure) {
          before = static_cast<int>(i);
          break;
        }
    }
    for (int i = 0; i < before && i < static_cast<int>(p.ops.size()); ++i) {
      auto t = touched_qubits(p.ops[i]);
      bool in_a = std::any_of(rule.a.begin(), rule.a.end(), [&](int q) { return t.count(q); });
      bool in_b = std::any_of(rule.b.begin(), rule.b.end(), [&](int q) { return t.count(q); });
      if (in_a && in_b) {
        std::ostringstream os;
        os << "operation " << i << " touches qubits from both forbidden sets";
        return StructuralViolation{r, i, os.str()};
      }
    }
  }
  return std::nullopt;
}

// --- .qspec ------------------------------------------------------------------

namespace {

int int_of(const SExpr& e) {
  double v;
  if (!e.is_atom || !parse_number(e.atom, v) || v != std::floor(v)) throw ParseError("expected an integer", e.line);
  return static_cast<int>(v);
}

std::string branch_of(const SExpr& e, std::size_t k) {
  if (e.list.size() <= k) return kAllBranches;
  const SExpr& b = e.list[k];
  if (!b.is_atom) throw ParseError("expected a branch label", b.line);
  for (char c : b.atom)
    if (c != '0' && c != '1' && c != '*') throw ParseError("bad branch label '" + b.atom + "'", b.line);
  return b.atom;
}

RealTerm term_of(const SExpr& e);

RealTerm ref_of(const SExpr& e, Role role) {
  if (e.list.size() < 3 || e.list.size() > 4) throw ParseError("reference takes state, target and an optional branch", e.line);
  return ref(role, int_of(e.list[1]), int_of(e.list[2]), branch_of(e, 3));
}

RealTerm term_of(const SExpr& e) {
  if (e.is_atom) {
    double v;
    if (e.atom == "pi") return RealTerm::pi();
    if (parse_number(e.atom, v)) return RealTerm(v);
    throw ParseError("unknown symbol '" + e.atom + "'", e.line);
  }
  if (e.list.empty() || !e.list[0].is_atom) throw ParseError("malformed term", e.line);
  const std::string& op = e.list[0].atom;
  Role role;
  if (parse_role(op, role)) return ref_of(e, role);
  if (op == "param") {
    if (e.list.size() != 2 || !e.list[1].is_atom) throw ParseError("param takes a name", e.line);
    return param(e.list[1].atom);
  }
  std::vector<RealTerm> a;
  for (std::size_t i = 1; i < e.list.size(); ++i) a.push_back(term_of(e.list[i]));
  if (a.empty()) throw ParseError("operator without operands", e.line);
  if (op == "+" || op == "*") {
    RealTerm acc = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc = op == "+" ? acc + a[i] : acc * a[i];
    return acc;
  }
  if (op == "-") {
    if (a.size() == 1) return -a[0];
    RealTerm acc = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc = acc - a[i];
    return acc;
  }
  if (op == "/" && a.size() == 2) return a[0] / a[1];
  if (op == "sin" && a.size() == 1) return sin_t(a[0]);
  if (op == "cos" && a.size() == 1) return cos_t(a[0]);
  if ((op == "^" || op == "pow") && a.size() == 2) return pow_t(a[0], a[1]);
  throw ParseError("unknown term operator '" + op + "'", e.line);
}

QubitTarget target_of(const SExpr& e) {
  if (e.is_atom || e.list.empty() || !e.list[0].is_atom) throw ParseError("expected a qubit operand", e.line);
  const std::string& op = e.list[0].atom;
  if (op == "q") {
    if (e.list.size() < 3 || e.list.size() > 4) throw ParseError("(q state qubit [branch])", e.line);
    return QubitTarget::q(int_of(e.list[1]), int_of(e.list[2]), branch_of(e, 3));
  }
  if (op == "flip") {
    if (e.list.size() != 2) throw ParseError("flip takes one qubit", e.line);
    QubitTarget t = target_of(e.list[1]);
    if (t.kind != QubitTarget::Kind::Ref) throw ParseError("flip takes a program qubit", e.line);
    t.kind = QubitTarget::Kind::Flip;
    return t;
  }
  if (op == "ket") {
    if (e.list.size() != 5) throw ParseError("(ket are aim bre bim)", e.line);
    double v[4];
    for (int i = 0; i < 4; ++i) {
      if (!e.list[i + 1].is_atom || !parse_number(e.list[i + 1].atom, v[i])) throw ParseError("ket takes numbers", e.line);
    }
    return QubitTarget::ket({v[0], v[1]}, {v[2], v[3]});
  }
  throw ParseError("unknown qubit operand '" + op + "'", e.line);
}

SpecFormula formula_of(const SExpr& e) {
  if (e.is_atom) {
    if (e.atom == "true") return SpecFormula::truth();
    if (e.atom == "false") return SpecFormula::falsity();
    throw ParseError("expected a formula, got '" + e.atom + "'", e.line);
  }
  if (e.list.empty() || !e.list[0].is_atom) throw ParseError("malformed formula", e.line);
  const std::string& op = e.list[0].atom;
  const std::size_t n = e.list.size() - 1;
  auto sub = [&](std::size_t i) { return formula_of(e.list[i]); };
  if (op == "and" || op == "or") {
    std::vector<SpecFormula> k;
    for (std::size_t i = 1; i <= n; ++i) k.push_back(sub(i));
    return op == "and" ? SpecFormula::all(std::move(k)) : SpecFormula::any(std::move(k));
  }
  if (op == "not" && n == 1) return SpecFormula::negation(sub(1));
  if (op == "=>" && n == 2) return SpecFormula::implies(sub(1), sub(2));
  if (op == "ite" && n == 3) return SpecFormula::ite(sub(1), sub(2), sub(3));
  if (op == "qeq" && n == 2) return SpecFormula::qubit_eq(target_of(e.list[1]), target_of(e.list[2]));
  if (op == "=" || op == "<=" || op == "<" || op == ">=" || op == ">") {
    if (n != 2) throw ParseError(op + " takes two terms", e.line);
    Rel r = op == "=" ? Rel::Eq : op == "<=" ? Rel::Le : op == "<" ? Rel::Lt : op == ">=" ? Rel::Ge : Rel::Gt;
    return SpecFormula::cmp(r, term_of(e.list[1]), term_of(e.list[2]));
  }
  throw ParseError("unknown formula operator '" + op + "'", e.line);
}

std::vector<int> int_list(const SExpr& e) {
  if (e.is_atom) return {int_of(e)};
  std::vector<int> out;
  for (const auto& x : e.list) out.push_back(int_of(x));
  return out;
}

}  // namespace

Spec parse_qspec(std::string_view text) {
  Spec s;
  std::vector<SpecFormula> parts;
  for (const auto& e : parse_sexprs(text)) {
    if (!e.is_atom && !e.list.empty() && e.list[0].is_atom && e.list[0].atom == "forbid-joint") {
      if (e.list.size() != 4) throw ParseError("(forbid-joint (A...) (B...) measure|N)", e.line);
      StructuralRule r;
      r.a = int_list(e.list[1]);
      r.b = int_list(e.list[2]);
      r.before = e.list[3].is_atom && e.list[3].atom == "measure" ? -1 : int_of(e.list[3]);
      s.rules.push_back(std::move(r));
      continue;
    }
    parts.push_back(formula_of(e));
  }
  s.formula = SpecFormula::all(std::move(parts));
  return s;
}

SmtScript Query::script() const {
  std::vector<Constraint> spec;
  if (negated.kind() == CKind::And) {
    spec = negated.kids();
  } else {
    spec.push_back(negated);
  }
  return enc.script({{"spec", spec}});
}

Query assemble_query(const ProgramModel& p, const SpecFormula& f, const EncodeOptions& opts, double eps) {
  Query q;
  q.enc = encode(p, opts);
  q.expanded = expand_branches(f, q.enc.table.branch_labels());
  q.negated = translate(negate(q.expanded, eps), q.enc.table);
  return q;
}

}  // namespace qvsmt
