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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "dsolve/poly.hpp"
#include "qvsmt/dsolve.hpp"

namespace qvsmt::dsolve {

namespace {

using Clock = std::chrono::steady_clock;

enum class LitKind : std::uint8_t { EqZ, GeZ, GtZ };
enum class Tri : std::uint8_t { F, T, U };

struct Lit {
  Poly p;
  LitKind k = LitKind::EqZ;
  std::vector<int> vars;
};
using LitPtr = std::shared_ptr<const Lit>;

// Definitions chosen from equalities, with memoised normal forms. Shared by
// contexts that only differ in residual literals.
struct Defs {
  std::vector<char> has_def;
  std::vector<RealTerm> def;
  std::unordered_set<const ConstraintNode*> used;
  std::unordered_map<const TermNode*, Poly> memo;
  std::vector<char> vstate;
  std::vector<Poly> vpoly;
  std::unordered_map<const ConstraintNode*, LitPtr> lits;
};

struct Ctx {
  std::shared_ptr<Defs> defs;
  std::vector<LitPtr> lits;
  std::vector<Interval> box;
  bool conflict = false;
};

struct Node {
  std::vector<Constraint> atoms;
  std::vector<Constraint> clauses;
  bool conflict = false;
};

struct Outcome {
  Status status = Status::Unknown;
  std::unordered_map<int, double> point;
  std::vector<Constraint> atoms;
};

void flatten(const Constraint& f, Node& n) {
  switch (f.kind()) {
    case CKind::True: return;
    case CKind::False: n.conflict = true; return;
    case CKind::Atom: n.atoms.push_back(f); return;
    case CKind::And:
      for (const auto& k : f.kids()) flatten(k, n);
      return;
    case CKind::Or: n.clauses.push_back(f); return;
    default: flatten(to_nnf(f), n); return;
  }
}

bool dyadic(double v) {
  double s = std::ldexp(v, 30);
  return std::abs(v) < 1e15 && s == std::floor(s);
}

class Engine {
 public:
  Engine(const ParsedScript& s, const Options& o) : script_(s), opt_(o), rng_(o.seed) {
    for (const auto& d : s.decls) {
      var_index_.emplace(d, static_cast<int>(names_.size()));
      names_.push_back(d);
    }
    start_ = Clock::now();
  }

  Result run() {
    Result res;
    Node root;
    for (const auto& a : script_.assertions) flatten(to_nnf(a), root);
    if (root.conflict) {
      res.status = Status::Unsat;
      res.stats = stats_;
      return res;
    }
    root_atoms_ = root.atoms;
    Outcome out = search(root, 0);
    res.stats = stats_;
    if (out.status == Status::Unsat) {
      res.status = Status::Unsat;
      return res;
    }
    if (out.status == Status::DeltaSat) {
      std::vector<double> val;
      if (assemble(out, val)) {
        res.status = Status::DeltaSat;
        for (std::size_t i = 0; i < names_.size(); ++i) res.model.emplace_back(names_[i], Interval(val[i]));
        return res;
      }
      res.reason = "witness failed final verification";
    }
    res.status = Status::Unknown;
    if (res.reason.empty()) res.reason = timed_out() ? "timeout" : "search budget exhausted";
    return res;
  }

 private:
  // --- normal forms ---------------------------------------------------------

  const std::vector<int>& term_vars(const RealTerm& t) {
    auto it = tvars_.find(t.node());
    if (it != tvars_.end()) return it->second;
    std::vector<int> v;
    if (t.op() == TermOp::Var) {
      v.push_back(index_of(t.name()));
    } else {
      for (const auto& a : t.args()) {
        const auto& s = term_vars(a);
        v.insert(v.end(), s.begin(), s.end());
      }
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return tvars_.emplace(t.node(), std::move(v)).first->second;
  }

  int index_of(const std::string& name) {
    auto it = var_index_.find(name);
    if (it != var_index_.end()) return it->second;
    var_index_.emplace(name, static_cast<int>(names_.size()));
    names_.push_back(name);
    return static_cast<int>(names_.size() - 1);
  }

  Poly poly_of(Defs& d, const RealTerm& t) {
    auto it = d.memo.find(t.node());
    if (it != d.memo.end()) return it->second;
    Poly r;
    const auto& a = t.args();
    switch (t.op()) {
      case TermOp::Var: r = var_poly(d, index_of(t.name())); break;
      case TermOp::Const:
        r = Poly::constant(dyadic(t.value()) ? Interval(t.value())
                                             : Interval(ia::down(t.value()), ia::up(t.value())));
        break;
      case TermOp::Pi: r = Poly::constant(Interval(std::numbers::pi, ia::up(std::numbers::pi))); break;
      case TermOp::Add: r = poly_of(d, a[0]) + poly_of(d, a[1]); break;
      case TermOp::Sub: r = poly_of(d, a[0]) - poly_of(d, a[1]); break;
      case TermOp::Mul: r = poly_of(d, a[0]) * poly_of(d, a[1]); break;
      case TermOp::Neg: r = -poly_of(d, a[0]); break;
      case TermOp::Div: {
        Poly num = poly_of(d, a[0]), den = poly_of(d, a[1]);
        Interval c = den.constant_part();
        if (den.is_constant() && !c.contains(0.0)) {
          r = scale(num, Interval(1.0) / c);
        } else {
          r = num * Poly::atom(atoms_.func_atom(AtomKind::Inv, den));
        }
        break;
      }
      case TermOp::Sin:
      case TermOp::Cos: {
        Poly x = poly_of(d, a[0]);
        if (x.is_constant()) {
          Interval c = x.constant_part();
          r = Poly::constant(t.op() == TermOp::Sin ? sin(c) : cos(c));
        } else {
          r = Poly::atom(atoms_.func_atom(t.op() == TermOp::Sin ? AtomKind::Sin : AtomKind::Cos, x));
        }
        break;
      }
      case TermOp::Pow: {
        Poly b = poly_of(d, a[0]), e = poly_of(d, a[1]);
        Interval ec = e.constant_part();
        if (e.is_constant() && ec.is_point() && ec.lo == std::floor(ec.lo) && ec.lo >= 0 && ec.lo <= 16) {
          r = pow(b, static_cast<unsigned>(ec.lo));
        } else if (b.is_constant() && e.is_constant()) {
          r = Poly::constant(qvsmt::pow(b.constant_part(), ec));
        } else {
          r = Poly::atom(atoms_.func_atom(AtomKind::Pow, b, &e));
        }
        break;
      }
    }
    d.memo.emplace(t.node(), r);
    return r;
  }

  Poly var_poly(Defs& d, int v) {
    if (static_cast<std::size_t>(v) >= d.vstate.size()) {
      d.vstate.resize(names_.size(), 0);
      d.vpoly.resize(names_.size());
      d.has_def.resize(names_.size(), 0);
      d.def.resize(names_.size());
    }
    if (d.vstate[v] == 2) return d.vpoly[v];
    if (!d.has_def[v] || d.vstate[v] == 1) return Poly::atom(atoms_.var_atom(v));
    d.vstate[v] = 1;
    Poly p = poly_of(d, d.def[v]);
    d.vstate[v] = 2;
    d.vpoly[v] = p;
    return p;
  }

  LitPtr lit_of(Defs& d, const Constraint& atom) {
    auto it = d.lits.find(atom.node());
    if (it != d.lits.end()) return it->second;
    auto l = std::make_shared<Lit>();
    Poly lhs = poly_of(d, atom.lhs()), rhs = poly_of(d, atom.rhs());
    switch (atom.rel()) {
      case Rel::Eq: l->p = lhs - rhs; l->k = LitKind::EqZ; break;
      case Rel::Le: l->p = rhs - lhs; l->k = LitKind::GeZ; break;
      case Rel::Lt: l->p = rhs - lhs; l->k = LitKind::GtZ; break;
      case Rel::Ge: l->p = lhs - rhs; l->k = LitKind::GeZ; break;
      case Rel::Gt: l->p = lhs - rhs; l->k = LitKind::GtZ; break;
    }
    collect_vars(l->p, atoms_, l->vars);
    std::sort(l->vars.begin(), l->vars.end());
    l->vars.erase(std::unique(l->vars.begin(), l->vars.end()), l->vars.end());
    LitPtr out = l;
    d.lits.emplace(atom.node(), out);
    return out;
  }

  // --- contexts -------------------------------------------------------------

  bool reaches(const Defs& d, const RealTerm& t, int v) {
    ++visit_stamp_;
    if (visit_.size() < names_.size()) visit_.resize(names_.size(), 0);
    std::vector<int> stack(term_vars(t).begin(), term_vars(t).end());
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (u == v) return true;
      if (visit_[u] == visit_stamp_) continue;
      visit_[u] = visit_stamp_;
      if (u < static_cast<int>(d.has_def.size()) && d.has_def[u]) {
        const auto& s = term_vars(d.def[u]);
        stack.insert(stack.end(), s.begin(), s.end());
      }
    }
    return false;
  }

  std::shared_ptr<Defs> choose_defs(const std::vector<Constraint>& atoms) {
    auto d = std::make_shared<Defs>();
    std::size_t n = names_.size();
    d->has_def.assign(n, 0);
    d->def.assign(n, RealTerm());
    auto define = [&](int v, const RealTerm& t, const Constraint& a) {
      d->has_def[v] = 1;
      d->def[v] = t;
      d->used.insert(a.node());
    };
    for (const auto& a : atoms) {
      if (a.rel() != Rel::Eq) continue;
      const RealTerm *v = nullptr, *t = nullptr;
      if (a.lhs().is_var() && a.rhs().is_const()) {
        v = &a.lhs();
        t = &a.rhs();
      } else if (a.rhs().is_var() && a.lhs().is_const()) {
        v = &a.rhs();
        t = &a.lhs();
      }
      if (!v) continue;
      int idx = index_of(v->name());
      if (!d->has_def[idx]) define(idx, *t, a);
    }
    for (const auto& a : atoms) {
      if (a.rel() != Rel::Eq || d->used.count(a.node())) continue;
      for (int side = 0; side < 2; ++side) {
        const RealTerm& v = side == 0 ? a.lhs() : a.rhs();
        const RealTerm& t = side == 0 ? a.rhs() : a.lhs();
        if (!v.is_var()) continue;
        int idx = index_of(v.name());
        if (d->has_def[idx] || reaches(*d, t, idx)) continue;
        define(idx, t, a);
        break;
      }
    }
    return d;
  }

  static void apply_bound(const Lit& l, const AtomTable& at, std::vector<Interval>& box) {
    // c*x + k with a single variable atom of degree one
    const Mono* m = nullptr;
    Interval c, k(0.0);
    for (const auto& [mono, coef] : l.p.terms) {
      if (mono.is_one()) {
        k = coef;
      } else if (!m && mono.f.size() == 1 && mono.f[0].second == 1 && at.def(mono.f[0].first).kind == AtomKind::Var) {
        m = &mono;
        c = coef;
      } else {
        return;
      }
    }
    if (!m || c.contains(0.0)) return;
    int v = at.def(m->f[0].first).var;
    Interval x = (-k) / c;  // root of c*x + k
    Interval& b = box[v];
    if (l.k == LitKind::EqZ) {
      b = intersect(b, x);
    } else if (c.lo > 0) {
      b.lo = std::max(b.lo, x.lo);
    } else {
      b.hi = std::min(b.hi, x.hi);
    }
  }

  Tri eval_lit(const Lit& l, const std::vector<Interval>& box, Evaluator& ev) {
    Interval e = ev.eval(l.p, box);
    switch (l.k) {
      case LitKind::EqZ:
        if (!e.contains(0.0)) return Tri::F;
        if (e.lo == 0.0 && e.hi == 0.0) return Tri::T;
        return Tri::U;
      case LitKind::GeZ:
        if (e.hi < 0.0) return Tri::F;
        if (e.lo >= 0.0) return Tri::T;
        return Tri::U;
      case LitKind::GtZ:
        if (e.hi <= 0.0) return Tri::F;
        if (e.lo > 0.0) return Tri::T;
        return Tri::U;
    }
    return Tri::U;
  }

  // Tightens the box with single-variable bounds and drops decided literals.
  void settle(Ctx& c) {
    for (int round = 0; round < 2; ++round)
      for (const auto& l : c.lits) apply_bound(*l, atoms_, c.box);
    for (const auto& b : c.box)
      if (b.empty()) {
        c.conflict = true;
        return;
      }
    Evaluator ev(atoms_);
    std::vector<LitPtr> keep;
    for (const auto& l : c.lits) {
      ev.reset();
      Tri t = eval_lit(*l, c.box, ev);
      if (t == Tri::F) {
        c.conflict = true;
        return;
      }
      if (t == Tri::U) keep.push_back(l);
    }
    c.lits = std::move(keep);
  }

  Ctx build(const std::vector<Constraint>& atoms) {
    Ctx c;
    c.defs = choose_defs(atoms);
    c.box.assign(names_.size(), Interval::entire());
    std::unordered_set<const ConstraintNode*> seen;
    for (const auto& a : atoms) {
      if (c.defs->used.count(a.node()) || !seen.insert(a.node()).second) continue;
      c.lits.push_back(lit_of(*c.defs, a));
    }
    if (c.box.size() < names_.size()) c.box.resize(names_.size(), Interval::entire());
    settle(c);
    return c;
  }

  static bool could_define(const Constraint& a) {
    return a.rel() == Rel::Eq && (a.lhs().is_var() || a.rhs().is_var());
  }

  Tri eval_formula(Ctx& c, const Constraint& f, Evaluator& ev) {
    switch (f.kind()) {
      case CKind::True: return Tri::T;
      case CKind::False: return Tri::F;
      case CKind::Atom: {
        ev.reset();
        return eval_lit(*lit_of(*c.defs, f), c.box, ev);
      }
      case CKind::And: {
        Tri r = Tri::T;
        for (const auto& k : f.kids()) {
          Tri t = eval_formula(c, k, ev);
          if (t == Tri::F) return Tri::F;
          if (t == Tri::U) r = Tri::U;
        }
        return r;
      }
      case CKind::Or: {
        Tri r = Tri::F;
        for (const auto& k : f.kids()) {
          Tri t = eval_formula(c, k, ev);
          if (t == Tri::T) return Tri::T;
          if (t == Tri::U) r = Tri::U;
        }
        return r;
      }
      default: return eval_formula(c, to_nnf(f), ev);
    }
  }

  // --- refutation by nonnegative combination -----------------------------------

  // Looks for lambda >= 0 with lead + sum lambda_i * lit_i enclosed strictly
  // below zero on the box; each literal is >= 0 on the feasible set, so the
  // combination would have to be >= 0 as well.
  bool farkas(const std::vector<const Lit*>& lits, const std::vector<Interval>& box) {
    struct Col {
      const Poly* p;
      double sign;
    };
    std::vector<Col> cols;
    for (const Lit* l : lits) {
      cols.push_back({&l->p, 1.0});
      if (l->k == LitKind::EqZ) cols.push_back({&l->p, -1.0});
    }
    if (cols.size() < 2 || cols.size() > 400) return false;
    Evaluator ev(atoms_);
    int tried = 0;
    for (std::size_t j = 0; j < cols.size() && tried < 48; ++j) {
      Interval k = cols[j].p->constant_part();
      if (cols[j].sign * (cols[j].sign > 0 ? k.hi : k.lo) >= 0.0) continue;
      ++tried;
      // monomials of the lead and columns sharing one, two hops out
      std::map<Mono, int> mono_index;
      auto add_monos = [&](const Poly& p) {
        for (const auto& [m, c] : p.terms)
          if (!m.is_one() && !mono_index.count(m)) mono_index.emplace(m, static_cast<int>(mono_index.size()));
      };
      add_monos(*cols[j].p);
      std::vector<std::size_t> pick;
      std::vector<char> taken(cols.size(), 0);
      taken[j] = 1;
      for (int hop = 0; hop < 2; ++hop) {
        std::vector<std::size_t> fresh;
        for (std::size_t i = 0; i < cols.size(); ++i) {
          if (taken[i]) continue;
          for (const auto& [m, c] : cols[i].p->terms)
            if (!m.is_one() && mono_index.count(m)) {
              fresh.push_back(i);
              taken[i] = 1;
              break;
            }
        }
        for (std::size_t i : fresh) add_monos(*cols[i].p);
        pick.insert(pick.end(), fresh.begin(), fresh.end());
        if (pick.size() > 120) break;
      }
      if (pick.empty() || pick.size() > 160) continue;
      const int m = static_cast<int>(mono_index.size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, static_cast<int>(pick.size()));
      Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
      for (const auto& [mono, c] : cols[j].p->terms)
        if (!mono.is_one()) b(mono_index[mono]) = cols[j].sign * c.mid();
      for (std::size_t q = 0; q < pick.size(); ++q)
        for (const auto& [mono, c] : cols[pick[q]].p->terms)
          if (!mono.is_one()) A(mono_index[mono], static_cast<int>(q)) = cols[pick[q]].sign * c.mid();
      Eigen::VectorXd lam = nnls(A, b);
      Poly s = scale(*cols[j].p, Interval(cols[j].sign));
      for (std::size_t q = 0; q < pick.size(); ++q)
        if (lam(static_cast<int>(q)) > 0)
          s = s + scale(*cols[pick[q]].p, Interval(cols[pick[q]].sign * lam(static_cast<int>(q))));
      ev.reset();
      if (ev.eval(s, box).hi < 0.0) {
        ++stats_.farkas_refutations;
        return true;
      }
    }
    return false;
  }

  // argmin ||A x + b|| subject to x >= 0, by cyclic coordinate descent.
  static Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const int n = static_cast<int>(A.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    Eigen::VectorXd nrm = A.colwise().squaredNorm();
    for (int sweep = 0; sweep < 400; ++sweep) {
      double moved = 0;
      for (int i = 0; i < n; ++i) {
        if (nrm(i) == 0) continue;
        double g = A.col(i).dot(r);
        double xi = std::max(0.0, x(i) - g / nrm(i));
        double d = xi - x(i);
        if (d != 0) {
          r += d * A.col(i);
          x(i) = xi;
          moved = std::max(moved, std::abs(d));
        }
      }
      if (moved < 1e-15) break;
    }
    return x;
  }

  // --- local search ---------------------------------------------------------

  struct Transform {
    double lo, hi;
    int kind;  // 0 free, 1 box, 2 lower, 3 upper
    double to_x(double u) const {
      switch (kind) {
        case 1: return lo + (hi - lo) * 0.5 * (1.0 + std::sin(u));
        case 2: return lo + u * u;
        case 3: return hi - u * u;
        default: return u;
      }
    }
    double to_u(double x) const {
      switch (kind) {
        case 1: {
          double s = hi > lo ? 2.0 * (x - lo) / (hi - lo) - 1.0 : 0.0;
          return std::asin(std::clamp(s, -1.0, 1.0));
        }
        case 2: return std::sqrt(std::max(0.0, x - lo));
        case 3: return std::sqrt(std::max(0.0, hi - x));
        default: return x;
      }
    }
  };

  struct Residual {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    Engine* eng = nullptr;
    const std::vector<const Lit*>* lits = nullptr;
    const std::vector<int>* vars = nullptr;
    const std::vector<Transform>* tf = nullptr;
    std::vector<double>* x = nullptr;
    double eta = 0.0;
    int n_in = 0, n_out = 0;

    int inputs() const { return n_in; }
    int values() const { return n_out; }
    int operator()(const Eigen::VectorXd& u, Eigen::VectorXd& f) const {
      for (int i = 0; i < n_in; ++i) (*x)[(*vars)[i]] = (*tf)[i].to_x(u(i));
      Evaluator ev(eng->atoms_);
      f.setZero();
      for (std::size_t i = 0; i < lits->size(); ++i) {
        const Lit& l = *(*lits)[i];
        double v = ev.eval_point(l.p, *x);
        f(static_cast<int>(i)) = l.k == LitKind::EqZ ? v : std::min(0.0, v - eta);
        if (!std::isfinite(f(static_cast<int>(i)))) f(static_cast<int>(i)) = 1e6;
      }
      return 0;
    }
  };

  bool point_ok(const std::vector<const Lit*>& lits, const std::vector<double>& x, double tol) {
    Evaluator ev(atoms_);
    for (const Lit* l : lits) {
      double v = ev.eval_point(l->p, x);
      if (!std::isfinite(v)) return false;
      if (l->k == LitKind::EqZ ? std::abs(v) > tol : v < -tol) return false;
    }
    return true;
  }

  bool local_search(const Ctx& c, const std::vector<const Lit*>& lits, const std::vector<int>& vars,
                    std::vector<double>& x) {
    ++stats_.local_searches;
    const int n = static_cast<int>(vars.size());
    std::vector<Transform> tf(n);
    for (int i = 0; i < n; ++i) {
      Interval b = c.box[vars[i]];
      Transform& t = tf[i];
      t.lo = b.lo;
      t.hi = b.hi;
      bool fl = std::isfinite(b.lo), fh = std::isfinite(b.hi);
      t.kind = fl && fh ? 1 : fl ? 2 : fh ? 3 : 0;
    }
    Residual r;
    r.eng = this;
    r.lits = &lits;
    r.vars = &vars;
    r.tf = &tf;
    r.x = &x;
    r.n_in = n;
    r.n_out = std::max<int>(n, static_cast<int>(lits.size()));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double tol = opt_.delta * 0.25;
    for (double eta : {std::min(10 * opt_.delta, 1e-2), 0.0}) {
      r.eta = eta;
      for (int rs = 0; rs < opt_.restarts; ++rs) {
        if (timed_out()) return false;
        Eigen::VectorXd u(n);
        for (int i = 0; i < n; ++i) {
          double xi;
          const Transform& t = tf[i];
          if (rs == 0) {
            xi = c.box[vars[i]].mid();
          } else if (t.kind == 1) {
            xi = t.lo + (t.hi - t.lo) * unit(rng_);
          } else {
            double base = t.kind == 2 ? t.lo : t.kind == 3 ? t.hi : 0.0;
            double span = 4.0 * unit(rng_);
            xi = t.kind == 3 ? base - span : t.kind == 2 ? base + span : span - 2.0;
          }
          u(i) = t.to_u(xi);
          if (t.kind == 1 && rs > 0) u(i) += 1e-3 * (unit(rng_) - 0.5);
        }
        Eigen::NumericalDiff<Residual> nd(r);
        Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residual>> lm(nd);
        lm.parameters.maxfev = 400 * (n + 1);
        lm.parameters.xtol = 1e-14;
        lm.parameters.ftol = 1e-14;
        lm.minimize(u);
        for (int i = 0; i < n; ++i) x[vars[i]] = tf[i].to_x(u(i));
        if (point_ok(lits, x, tol)) return true;
      }
    }
    return false;
  }

  // --- branch and prune -----------------------------------------------------

  Status icp(const Ctx& c, const std::vector<const Lit*>& lits, const std::vector<int>& vars, std::vector<double>& x) {
    std::vector<Interval> work = c.box;
    std::vector<std::vector<Interval>> stack;
    std::vector<Interval> init(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) init[i] = c.box[vars[i]];
    stack.push_back(std::move(init));
    Evaluator ev(atoms_);
    long unknown = 0;
    const double min_width = std::max(opt_.delta * 1e-3, 1e-12);
    while (!stack.empty()) {
      if (++stats_.boxes > opt_.max_boxes || timed_out()) return Status::Unknown;
      std::vector<Interval> b = std::move(stack.back());
      stack.pop_back();
      for (std::size_t i = 0; i < vars.size(); ++i) work[vars[i]] = b[i];
      ev.reset();
      bool dead = false, all_true = true;
      for (const Lit* l : lits) {
        Tri t = eval_lit(*l, work, ev);
        if (t == Tri::F) {
          dead = true;
          break;
        }
        if (t == Tri::U) all_true = false;
      }
      if (dead) continue;
      std::size_t wide = 0;
      double wmax = -1;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        double w = b[i].width();
        if (w > wmax) {
          wmax = w;
          wide = i;
        }
      }
      if (all_true || wmax < min_width || vars.empty()) {
        for (std::size_t i = 0; i < vars.size(); ++i) x[vars[i]] = b[i].mid();
        if (point_ok(lits, x, opt_.delta * 0.5)) return Status::DeltaSat;
        ++unknown;
        continue;
      }
      if (wmax < 64 * opt_.delta && (stats_.boxes % 64) == 0) {
        for (std::size_t i = 0; i < vars.size(); ++i) x[vars[i]] = b[i].mid();
        if (point_ok(lits, x, opt_.delta * 0.5)) return Status::DeltaSat;
      }
      Interval w = b[wide];
      double m = w.mid();
      if (!std::isfinite(w.width())) m = std::isfinite(w.lo) ? w.lo + 1.0 + 2 * std::abs(w.lo) : std::isfinite(w.hi) ? w.hi - 1.0 - 2 * std::abs(w.hi) : 0.0;
      std::vector<Interval> left = b, right = std::move(b);
      left[wide].hi = m;
      right[wide].lo = m;
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));
    }
    return unknown ? Status::Unknown : Status::Unsat;
  }

  // --- search -----------------------------------------------------------------

  bool timed_out() const {
    if (opt_.timeout_s <= 0) return false;
    return std::chrono::duration<double>(Clock::now() - start_).count() > opt_.timeout_s;
  }

  static std::vector<Constraint> disjuncts(const Constraint& clause) {
    return clause.kind() == CKind::Or ? clause.kids() : std::vector<Constraint>{clause};
  }

  // Literal view of a disjunct when it is an atom or a conjunction of atoms.
  bool atoms_of(const Constraint& d, std::vector<Constraint>& out) {
    if (d.kind() == CKind::Atom) {
      out.push_back(d);
      return true;
    }
    if (d.kind() == CKind::And) {
      for (const auto& k : d.kids())
        if (!atoms_of(k, out)) return false;
      return true;
    }
    return false;
  }

  bool probe_refutes(Ctx& c, const Constraint& d) {
    std::vector<Constraint> as;
    if (!atoms_of(d, as)) return false;
    std::vector<Interval> box = c.box;
    std::vector<LitPtr> dl;
    for (const auto& a : as) dl.push_back(lit_of(*c.defs, a));
    for (int round = 0; round < 2; ++round)
      for (const auto& l : dl) apply_bound(*l, atoms_, box);
    for (const auto& b : box)
      if (b.empty()) return true;
    Evaluator ev(atoms_);
    std::vector<const Lit*> all;
    for (const auto& l : dl) {
      ev.reset();
      if (eval_lit(*l, box, ev) == Tri::F) return true;
      all.push_back(l.get());
    }
    for (const auto& l : c.lits) {
      ev.reset();
      if (eval_lit(*l, box, ev) == Tri::F) return true;
      all.push_back(l.get());
    }
    return farkas(all, box);
  }

  // Unit propagation over clauses; returns false on conflict.
  bool propagate(Node& n, Ctx& c, bool& changed) {
    changed = false;
    Evaluator ev(atoms_);
    std::vector<Constraint> keep;
    std::vector<Constraint> units;
    for (const auto& cl : n.clauses) {
      std::vector<Constraint> open;
      bool sat = false;
      for (const auto& d : disjuncts(cl)) {
        Tri t = eval_formula(c, d, ev);
        if (t == Tri::T) {
          sat = true;
          break;
        }
        if (t == Tri::U) open.push_back(d);
      }
      if (sat) continue;
      if (open.empty()) return false;
      if (open.size() == 1) {
        units.push_back(open[0]);
        changed = true;
      } else {
        keep.push_back(open.size() == disjuncts(cl).size() ? cl : Constraint::disj(open));
      }
    }
    n.clauses = std::move(keep);
    for (const auto& u : units) {
      Node tmp;
      flatten(u, tmp);
      if (tmp.conflict) return false;
      n.atoms.insert(n.atoms.end(), tmp.atoms.begin(), tmp.atoms.end());
      n.clauses.insert(n.clauses.end(), tmp.clauses.begin(), tmp.clauses.end());
    }
    return true;
  }

  // Adds atoms to a context without re-choosing definitions.
  bool extend(Ctx& c, const std::vector<Constraint>& atoms) {
    for (const auto& a : atoms)
      if (could_define(a)) return false;
    for (const auto& a : atoms) c.lits.push_back(lit_of(*c.defs, a));
    settle(c);
    return true;
  }

  Outcome search(Node n, int depth) {
    ++stats_.nodes;
    Outcome fail;
    fail.status = Status::Unsat;
    if (n.conflict) return fail;
    if (timed_out()) return {};
    Ctx c = build(n.atoms);
    for (;;) {
      if (c.conflict) return fail;
      bool changed = false;
      std::size_t before = n.atoms.size();
      if (!propagate(n, c, changed)) return fail;
      if (!changed) {
        // failed-literal probing
        std::vector<Constraint> keep;
        std::vector<Constraint> units;
        bool refuted_any = false;
        for (const auto& cl : n.clauses) {
          std::vector<Constraint> open;
          for (const auto& d : disjuncts(cl)) {
            if (probe_refutes(c, d)) {
              refuted_any = true;
            } else {
              open.push_back(d);
            }
          }
          if (open.empty()) return fail;
          if (open.size() == 1) {
            units.push_back(open[0]);
          } else {
            keep.push_back(Constraint::disj(open));
          }
        }
        n.clauses = std::move(keep);
        if (units.empty()) break;
        for (const auto& u : units) {
          Node tmp;
          flatten(u, tmp);
          if (tmp.conflict) return fail;
          n.atoms.insert(n.atoms.end(), tmp.atoms.begin(), tmp.atoms.end());
          n.clauses.insert(n.clauses.end(), tmp.clauses.begin(), tmp.clauses.end());
        }
        (void)refuted_any;
      }
      std::vector<Constraint> added(n.atoms.begin() + static_cast<long>(before), n.atoms.end());
      if (!extend(c, added)) c = build(n.atoms);
    }

    {
      std::vector<const Lit*> all;
      for (const auto& l : c.lits) all.push_back(l.get());
      if (farkas(all, c.box)) return fail;
    }

    // components over literals and clauses
    std::vector<int> parent(names_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    auto unite = [&](const std::vector<int>& vs) {
      for (std::size_t i = 1; i < vs.size(); ++i) parent[find(vs[i])] = find(vs[0]);
    };
    for (const auto& l : c.lits) unite(l->vars);
    std::vector<std::vector<int>> clause_vars(n.clauses.size());
    for (std::size_t i = 0; i < n.clauses.size(); ++i) {
      std::vector<Constraint> as;
      collect_atoms(n.clauses[i], as);
      for (const auto& a : as) {
        const auto& vs = lit_of(*c.defs, a)->vars;
        clause_vars[i].insert(clause_vars[i].end(), vs.begin(), vs.end());
      }
      unite(clause_vars[i]);
    }
    std::unordered_map<int, int> comp_of_root;
    auto comp_id = [&](int v) {
      int r = find(v);
      auto it = comp_of_root.find(r);
      if (it != comp_of_root.end()) return it->second;
      int id = static_cast<int>(comp_of_root.size());
      comp_of_root.emplace(r, id);
      return id;
    };
    std::vector<std::vector<const Lit*>> comp_lits;
    std::vector<std::vector<Constraint>> comp_clauses;
    auto ensure = [&](int id) {
      if (static_cast<std::size_t>(id) >= comp_lits.size()) {
        comp_lits.resize(id + 1);
        comp_clauses.resize(id + 1);
      }
    };
    for (const auto& l : c.lits) {
      if (l->vars.empty()) continue;
      int id = comp_id(l->vars[0]);
      ensure(id);
      comp_lits[id].push_back(l.get());
    }
    std::vector<Constraint> const_clauses;
    for (std::size_t i = 0; i < n.clauses.size(); ++i) {
      if (clause_vars[i].empty()) {
        const_clauses.push_back(n.clauses[i]);
        continue;
      }
      int id = comp_id(clause_vars[i][0]);
      ensure(id);
      comp_clauses[id].push_back(n.clauses[i]);
    }
    if (!const_clauses.empty()) {
      // every atom is decided; propagate() would already have resolved them
      return {};
    }

    Outcome out;
    out.status = Status::DeltaSat;
    out.atoms = n.atoms;
    bool unknown = false;
    for (std::size_t id = 0; id < comp_lits.size(); ++id) {
      if (timed_out()) return {};
      Outcome sub;
      if (comp_clauses[id].empty()) {
        sub = theory(c, comp_lits[id]);
      } else if (comp_lits.size() == 1) {
        sub = branch(n, c, depth);
      } else {
        Node child;
        std::unordered_set<const Lit*> mine(comp_lits[id].begin(), comp_lits[id].end());
        for (const auto& a : n.atoms) {
          if (c.defs->used.count(a.node())) {
            child.atoms.push_back(a);
            continue;
          }
          if (mine.count(lit_of(*c.defs, a).get())) child.atoms.push_back(a);
        }
        child.clauses = comp_clauses[id];
        sub = search(std::move(child), depth + 1);
      }
      if (sub.status == Status::Unsat) return fail;
      if (sub.status == Status::Unknown) {
        unknown = true;
        continue;
      }
      for (const auto& [k, v] : sub.point) out.point[k] = v;
      out.atoms.insert(out.atoms.end(), sub.atoms.begin(), sub.atoms.end());
    }
    if (unknown) return {};
    return out;
  }

  void collect_atoms(const Constraint& f, std::vector<Constraint>& out) {
    if (f.kind() == CKind::Atom) {
      out.push_back(f);
      return;
    }
    for (const auto& k : f.kids()) collect_atoms(k, out);
  }

  Outcome branch(const Node& n, Ctx& c, int depth) {
    // fewest open disjuncts, then most equalities
    std::size_t best = 0;
    long best_score = 0;
    for (std::size_t i = 0; i < n.clauses.size(); ++i) {
      std::vector<Constraint> as;
      collect_atoms(n.clauses[i], as);
      long eqs = 0;
      for (const auto& a : as) eqs += a.rel() == Rel::Eq;
      long score = static_cast<long>(disjuncts(n.clauses[i]).size()) * 100000 - eqs;
      if (i == 0 || score < best_score) {
        best = i;
        best_score = score;
      }
    }
    (void)c;
    bool unknown = false;
    for (const auto& d : disjuncts(n.clauses[best])) {
      Node child;
      child.atoms = n.atoms;
      for (std::size_t i = 0; i < n.clauses.size(); ++i)
        if (i != best) child.clauses.push_back(n.clauses[i]);
      flatten(d, child);
      Outcome r = search(std::move(child), depth + 1);
      if (r.status == Status::DeltaSat) return r;
      if (r.status == Status::Unknown) unknown = true;
    }
    Outcome o;
    o.status = unknown ? Status::Unknown : Status::Unsat;
    return o;
  }

  Outcome theory(const Ctx& c, const std::vector<const Lit*>& lits) {
    Outcome o;
    o.status = Status::Unsat;
    if (farkas(lits, c.box)) return o;
    std::vector<int> vars;
    for (const Lit* l : lits) vars.insert(vars.end(), l->vars.begin(), l->vars.end());
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    std::vector<double> x(names_.size(), 0.0);
    for (std::size_t i = 0; i < names_.size(); ++i) x[i] = c.box[i].mid();
    if (local_search(c, lits, vars, x)) {
      o.status = Status::DeltaSat;
      for (int v : vars) o.point[v] = x[v];
      return o;
    }
    Status s = icp(c, lits, vars, x);
    o.status = s;
    if (s == Status::DeltaSat)
      for (int v : vars) o.point[v] = x[v];
    return o;
  }

  // Completes a witness and checks every original assertion at it.
  bool assemble(const Outcome& out, std::vector<double>& val) {
    std::vector<Constraint> atoms = root_atoms_;
    atoms.insert(atoms.end(), out.atoms.begin(), out.atoms.end());
    Ctx c = build(atoms);
    const std::size_t n = names_.size();
    val.assign(n, 0.0);
    std::vector<char> state(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < c.defs->has_def.size() && c.defs->has_def[i]) continue;
      auto it = out.point.find(static_cast<int>(i));
      double v = it != out.point.end() ? it->second : (i < c.box.size() ? c.box[i].mid() : 0.0);
      if (i < c.box.size() && !c.box[i].contains(v) && it == out.point.end()) v = c.box[i].lo;
      val[i] = v;
      state[i] = 2;
    }
    std::function<double(int)> value = [&](int v) -> double {
      if (state[v] == 2) return val[v];
      if (state[v] == 1) return val[v];
      state[v] = 1;
      double r = evaluate(c.defs->def[v], [&](const std::string& nm) { return value(index_of(nm)); });
      val[v] = r;
      state[v] = 2;
      return r;
    };
    for (std::size_t i = 0; i < n; ++i) value(static_cast<int>(i));
    Valuation vm;
    for (std::size_t i = 0; i < n; ++i) vm[names_[i]] = val[i];
    for (const auto& a : script_.assertions) {
      if (!holds(to_nnf(a), vm, opt_.delta)) {
        if (opt_.verbose) std::fprintf(stderr, "witness violates: %s\n", to_smtlib(a).c_str());
        return false;
      }
    }
    return true;
  }

  const ParsedScript& script_;
  Options opt_;
  std::mt19937_64 rng_;
  std::unordered_map<std::string, int> var_index_;
  std::vector<std::string> names_;
  AtomTable atoms_;
  std::unordered_map<const TermNode*, std::vector<int>> tvars_;
  std::vector<std::uint64_t> visit_;
  std::uint64_t visit_stamp_ = 0;
  std::vector<Constraint> root_atoms_;
  Clock::time_point start_;
  Stats stats_;
};

}  // namespace

Result solve(const ParsedScript& script, const Options& opts) {
  Engine e(script, opts);
  return e.run();
}

std::string format_result(const Result& r, double delta, bool with_model) {
  std::string out;
  char buf[128];
  switch (r.status) {
    case Status::Unsat: return "unsat\n";
    case Status::Unknown: return "unknown\n";
    case Status::DeltaSat:
      std::snprintf(buf, sizeof(buf), "delta-sat with delta = %.17g\n", delta);
      out += buf;
      if (with_model) {
        for (const auto& [name, iv] : r.model) {
          std::snprintf(buf, sizeof(buf), " : [%.17g, %.17g]\n", iv.lo, iv.hi);
          out += name;
          out += buf;
        }
      }
      return out;
  }
  return out;
}

}  // namespace qvsmt::dsolve
