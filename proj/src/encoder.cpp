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


#include "qvsmt/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace qvsmt {

const char* role_name(Role r) {
  switch (r) {
    case Role::Alpha: return "alpha";
    case Role::AlphaIm: return "alpha_im";
    case Role::BetaRe: return "beta_re";
    case Role::BetaIm: return "beta_im";
    case Role::Phi: return "phi";
    case Role::Theta: return "theta";
    case Role::AmpRe: return "amp_re";
    case Role::AmpIm: return "amp_im";
  }
  return "?";
}

bool parse_role(const std::string& s, Role& out) {
  for (Role r : {Role::Alpha, Role::AlphaIm, Role::BetaRe, Role::BetaIm, Role::Phi, Role::Theta, Role::AmpRe,
                 Role::AmpIm}) {
    if (s == role_name(r)) {
      out = r;
      return true;
    }
  }
  if (s == "alpha_re") {
    out = Role::Alpha;
    return true;
  }
  return false;
}

const char* mode_name(Mode m) { return m == Mode::Exact ? "exact" : "box"; }

std::string block_var(const std::string& role, int state, int qubit, const std::string& branch) {
  std::string s = role + "_" + std::to_string(state) + "_" + std::to_string(qubit);
  if (!branch.empty()) s += "_" + branch;
  return s;
}

std::string vector_var(int state, const std::vector<int>& qubits, std::size_t index, bool im, const std::string& branch) {
  std::string s = "s_" + std::to_string(state) + "_g";
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(qubits[i]);
  }
  s += "_" + std::to_string(index) + (im ? "_im" : "_re");
  if (!branch.empty()) s += "_" + branch;
  return s;
}

Constraint qubit_constraints(const QubitBlock& q, const EncodeOptions& opts) {
  std::vector<Constraint> c;
  const RealTerm& a = q.alpha.re;
  const RealTerm& br = q.beta.re;
  const RealTerm& bi = q.beta.im;
  bool eq1 = opts.mode == Mode::Exact || opts.box_keep_eq1;
  if (eq1 && q.phi && q.theta) {
    RealTerm half = RealTerm(0.5) * *q.theta;
    c.push_back(Constraint::eq(a, cos_t(half)));
    c.push_back(Constraint::eq(br, cos_t(*q.phi) * sin_t(half)));
    c.push_back(Constraint::eq(bi, sin_t(*q.phi) * sin_t(half)));
  }
  if (opts.mode == Mode::Exact) {
    const RealTerm& th = *q.theta;
    const RealTerm& ph = *q.phi;
    c.push_back(Constraint::le(0.0, th));
    c.push_back(Constraint::le(th, RealTerm::pi()));
    c.push_back(Constraint::le(0.0, ph));
    c.push_back(Constraint::lt(ph, RealTerm(2.0) * RealTerm::pi()));
    c.push_back(Constraint::implies(Constraint::eq(th, 0.0), Constraint::eq(ph, 0.0)));
    c.push_back(Constraint::implies(Constraint::eq(th, RealTerm::pi()), Constraint::eq(ph, 0.0)));
  } else {
    for (const RealTerm* t : {&a, &br, &bi}) {
      c.push_back(Constraint::le(-1.0, *t));
      c.push_back(Constraint::le(*t, 1.0));
    }
  }
  return Constraint::conj(std::move(c));
}

std::vector<ComplexTerm> tensor_terms(const std::vector<ComplexTerm>& a, const std::vector<ComplexTerm>& b) {
  std::vector<ComplexTerm> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x * y);
  return out;
}

namespace {

std::size_t bit_of(std::size_t index, std::size_t pos, std::size_t width) { return (index >> (width - 1 - pos)) & 1u; }

std::size_t position(const std::vector<int>& qubits, int q) {
  auto it = std::find(qubits.begin(), qubits.end(), q);
  if (it == qubits.end()) throw std::invalid_argument("qubit " + std::to_string(q) + " not in group");
  return static_cast<std::size_t>(it - qubits.begin());
}

bool is_zero_const(const ComplexTerm& c) { return c.re.is_const(0.0) && c.im.is_const(0.0); }

ComplexTerm sum(const std::vector<ComplexTerm>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  ComplexTerm s = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) s = s + xs[i];
  return s;
}

}  // namespace

std::vector<ComplexTerm> apply_matrix_terms(const GateMatrix& u, const std::vector<int>& group_qubits,
                                            const std::vector<int>& op_qubits, const std::vector<ComplexTerm>& amps) {
  const std::size_t w = group_qubits.size(), k = op_qubits.size();
  if (u.dim != (std::size_t{1} << k)) throw std::invalid_argument("matrix dimension does not match operand count");
  std::vector<std::size_t> pos(k);
  for (std::size_t i = 0; i < k; ++i) pos[i] = position(group_qubits, op_qubits[i]);
  std::size_t op_mask = 0;
  for (std::size_t p : pos) op_mask |= std::size_t{1} << (w - 1 - p);
  std::vector<ComplexTerm> out(amps.size());
  for (std::size_t j = 0; j < amps.size(); ++j) {
    std::size_t row = 0;
    for (std::size_t i = 0; i < k; ++i) row = row << 1 | bit_of(j, pos[i], w);
    std::vector<ComplexTerm> terms;
    for (std::size_t col = 0; col < u.dim; ++col) {
      const ComplexTerm& e = u.at(row, col);
      if (is_zero_const(e)) continue;
      std::size_t src = j & ~op_mask;
      for (std::size_t i = 0; i < k; ++i)
        if (bit_of(col, i, k)) src |= std::size_t{1} << (w - 1 - pos[i]);
      terms.push_back(e * amps[src]);
    }
    out[j] = sum(terms);
  }
  return out;
}

std::vector<ComplexTerm> project_terms(const std::vector<int>& group_qubits, const std::vector<ComplexTerm>& amps,
                                       const std::vector<int>& measured, const std::vector<int>& outcome) {
  const std::size_t w = group_qubits.size();
  std::vector<std::size_t> rest;
  std::size_t fixed = 0;
  for (std::size_t p = 0; p < w; ++p) {
    auto it = std::find(measured.begin(), measured.end(), group_qubits[p]);
    if (it == measured.end()) {
      rest.push_back(p);
    } else if (outcome[it - measured.begin()]) {
      fixed |= std::size_t{1} << (w - 1 - p);
    }
  }
  std::vector<ComplexTerm> out(std::size_t{1} << rest.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    std::size_t idx = fixed;
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (bit_of(r, i, rest.size())) idx |= std::size_t{1} << (w - 1 - rest[i]);
    out[r] = amps[idx];
  }
  return out;
}

// --- symbol table ------------------------------------------------------------

const Snapshot& SymbolTable::snapshot(int state, const std::string& branch) const {
  if (state < 0 || state >= state_count()) throw UnresolvedSymRef("state " + std::to_string(state) + " out of range");
  std::size_t need = static_cast<std::size_t>(measured_before_[state]);
  if (branch.size() < need)
    throw UnresolvedSymRef("state " + std::to_string(state) + " needs a branch label of length " + std::to_string(need));
  auto it = snaps_.find({state, branch.substr(0, need)});
  if (it == snaps_.end()) throw UnresolvedSymRef("no state " + std::to_string(state) + " on branch '" + branch + "'");
  return it->second;
}

std::vector<std::pair<ComplexTerm, ComplexTerm>> SymbolTable::qubit_pairs(int state, int qubit,
                                                                          const std::string& branch) const {
  const Snapshot& s = snapshot(state, branch);
  if (qubit < 0 || qubit >= n_qubits_) throw UnresolvedSymRef("qubit " + std::to_string(qubit) + " out of range");
  const auto& g = s.groups[s.group_of[qubit]];
  if (g.is_block) return {{g.block.alpha, g.block.beta}};
  const std::size_t w = g.qubits.size(), p = position(g.qubits, qubit);
  const std::size_t mask = std::size_t{1} << (w - 1 - p);
  std::vector<std::pair<ComplexTerm, ComplexTerm>> out;
  for (std::size_t i = 0; i < g.vec.amps.size(); ++i)
    if (!(i & mask)) out.emplace_back(g.vec.amps[i], g.vec.amps[i | mask]);
  return out;
}

ComplexTerm SymbolTable::amplitude(int state, std::size_t index, const std::string& branch) const {
  const Snapshot& s = snapshot(state, branch);
  const std::size_t n = static_cast<std::size_t>(n_qubits_);
  if (index >= (std::size_t{1} << n)) throw UnresolvedSymRef("amplitude index " + std::to_string(index) + " out of range");
  ComplexTerm acc{1.0, 0.0};
  for (const auto& g : s.groups) {
    if (g.is_block) {
      acc = acc * (bit_of(index, g.qubits[0], n) ? g.block.beta : g.block.alpha);
    } else {
      std::size_t sub = 0;
      for (int q : g.qubits) sub = sub << 1 | bit_of(index, q, n);
      acc = acc * g.vec.amps[sub];
    }
  }
  return acc;
}

RealTerm SymbolTable::component(int state, int qubit, const std::string& branch, Role role) const {
  const Snapshot& s = snapshot(state, branch);
  if (qubit < 0 || qubit >= n_qubits_) throw UnresolvedSymRef("qubit " + std::to_string(qubit) + " out of range");
  const auto& g = s.groups[s.group_of[qubit]];
  const std::string where = "q" + std::to_string(qubit) + " at state " + std::to_string(state);
  if (!g.is_block) throw UnresolvedSymRef(where + " is part of an entangled group");
  const QubitBlock& b = g.block;
  switch (role) {
    case Role::Alpha: return b.alpha.re;
    case Role::AlphaIm: return b.alpha.im;
    case Role::BetaRe: return b.beta.re;
    case Role::BetaIm: return b.beta.im;
    case Role::Phi:
      if (b.phi) return *b.phi;
      break;
    case Role::Theta:
      if (b.theta) return *b.theta;
      break;
    default: break;
  }
  throw UnresolvedSymRef(where + " has no " + role_name(role) + " component");
}

RealTerm SymbolTable::param(const std::string& name) const {
  if (std::find(params_.begin(), params_.end(), name) == params_.end())
    throw UnresolvedSymRef("unknown parameter " + name);
  return qvsmt::param(name);
}

std::vector<std::pair<Role, std::string>> SymbolTable::block_vars(int state, int qubit, const std::string& branch) const {
  std::vector<std::pair<Role, std::string>> out;
  const Snapshot& s = snapshot(state, branch);
  const auto& g = s.groups[s.group_of[qubit]];
  if (!g.is_block) return out;
  auto add = [&](Role r, const RealTerm& t) {
    if (t.is_var()) out.emplace_back(r, t.name());
  };
  add(Role::Alpha, g.block.alpha.re);
  add(Role::AlphaIm, g.block.alpha.im);
  add(Role::BetaRe, g.block.beta.re);
  add(Role::BetaIm, g.block.beta.im);
  if (g.block.phi) add(Role::Phi, *g.block.phi);
  if (g.block.theta) add(Role::Theta, *g.block.theta);
  return out;
}

Constraint EncodingResult::formula() const {
  std::vector<Constraint> all = qubit_constraints;
  all.insert(all.end(), initial.begin(), initial.end());
  all.insert(all.end(), operations.begin(), operations.end());
  return Constraint::conj(std::move(all));
}

SmtScript EncodingResult::script(std::vector<SmtSection> extra) const {
  SmtScript s;
  s.decls = decls;
  s.sections.push_back({"qubit-constraints", qubit_constraints});
  s.sections.push_back({"initial", initial});
  s.sections.push_back({"operations", operations});
  for (auto& e : extra) s.sections.push_back(std::move(e));
  return s;
}

// --- encoder -----------------------------------------------------------------

class Encoder {
 public:
  Encoder(const ProgramModel& p, const EncodeOptions& o) : p_(p), o_(o) {}

  EncodingResult run() {
    r_.table.n_qubits_ = p_.n_qubits;
    for (int s = 0; s < p_.state_count(); ++s) r_.table.measured_before_.push_back(p_.measured_before(s));
    r_.table.labels_ = branch_labels(p_);
    for (const auto& pr : p_.params) {
      r_.table.params_.push_back(pr.name);
      RealTerm v = declare(param_var(pr.name), {-1, 0, "", 0, 0});
      if (pr.lo) r_.initial.push_back(Constraint::le(*pr.lo, v));
      if (pr.hi) r_.initial.push_back(pr.hi_open ? Constraint::lt(v, *pr.hi) : Constraint::le(v, *pr.hi));
    }

    std::vector<Snapshot> frontier{initial_state()};
    std::vector<RealTerm> prob{RealTerm(1.0)};
    record(frontier[0]);
    for (std::size_t i = 0; i < p_.ops.size(); ++i) {
      const StateOp& op = p_.ops[i];
      std::vector<Snapshot> next;
      std::vector<RealTerm> next_prob;
      for (std::size_t b = 0; b < frontier.size(); ++b) {
        if (op.kind == StateOp::Kind::Gate) {
          next.push_back(step_gate(frontier[b], op.gate));
          next_prob.push_back(prob[b]);
        } else {
          auto [snaps, ps] = step_measure(frontier[b], op.measured);
          for (std::size_t k = 0; k < snaps.size(); ++k) {
            next.push_back(std::move(snaps[k]));
            next_prob.push_back(prob[b] * ps[k]);
          }
        }
      }
      frontier = std::move(next);
      prob = std::move(next_prob);
      for (const auto& s : frontier) record(s);
    }
    for (std::size_t b = 0; b < frontier.size(); ++b) r_.probabilities.push_back({frontier[b].branch, prob[b]});

    std::sort(decls_.begin(), decls_.end());
    for (auto& d : decls_) r_.decls.push_back(std::get<5>(d));
    return std::move(r_);
  }

 private:
  using Key = std::tuple<int, int, std::string, int, std::size_t, std::string>;
  struct KeyIn {
    int state;
    int qubit;
    std::string branch;
    int role;
    std::size_t index;
  };

  RealTerm declare(const std::string& name, const KeyIn& k) {
    decls_.emplace_back(k.state, k.qubit, k.branch, k.role, k.index, name);
    return RealTerm::var(name);
  }

  void record(const Snapshot& s) { r_.table.snaps_[{s.state, s.branch}] = s; }

  static void bind(const ComplexTerm& var, const ComplexTerm& value, std::vector<Constraint>& out) {
    out.push_back(Constraint::eq(var.re, value.re));
    out.push_back(Constraint::eq(var.im, value.im));
  }

  QubitBlock canonical(int state, int q, const std::string& br, bool emit_shape = true) {
    QubitBlock b;
    b.state = state;
    b.qubit = q;
    b.branch = br;
    b.canonical = true;
    b.alpha = {declare(block_var("alpha", state, q, br), {state, q, br, 0, 0}), 0.0};
    b.beta = {declare(block_var("beta_re", state, q, br), {state, q, br, 2, 0}),
              declare(block_var("beta_im", state, q, br), {state, q, br, 3, 0})};
    if (o_.phase_vars()) {
      b.phi = declare(block_var("phi", state, q, br), {state, q, br, 4, 0});
      b.theta = declare(block_var("theta", state, q, br), {state, q, br, 5, 0});
    }
    if (emit_shape) r_.qubit_constraints.push_back(qubit_constraints(b, o_));
    return b;
  }

  QubitBlock derived(int state, int q, const std::string& br) {
    QubitBlock b;
    b.state = state;
    b.qubit = q;
    b.branch = br;
    b.canonical = false;
    b.alpha = {declare(block_var("alpha_re", state, q, br), {state, q, br, 0, 0}),
               declare(block_var("alpha_im", state, q, br), {state, q, br, 1, 0})};
    b.beta = {declare(block_var("beta_re", state, q, br), {state, q, br, 2, 0}),
              declare(block_var("beta_im", state, q, br), {state, q, br, 3, 0})};
    return b;
  }

  QubitBlock derived_bound(int state, int q, const std::string& br, const QubitAmp& v) {
    QubitBlock b = derived(state, q, br);
    bind(b.alpha, v.alpha, r_.operations);
    bind(b.beta, v.beta, r_.operations);
    return b;
  }

  SymbolicStateVector vector(int state, const std::vector<int>& qs, const std::string& br) {
    SymbolicStateVector v;
    v.qubits = qs;
    v.state = state;
    v.branch = br;
    const std::size_t dim = std::size_t{1} << qs.size();
    for (std::size_t i = 0; i < dim; ++i)
      v.amps.push_back({declare(vector_var(state, qs, i, false, br), {state, qs[0], br, 6, 2 * i}),
                        declare(vector_var(state, qs, i, true, br), {state, qs[0], br, 6, 2 * i + 1})});
    return v;
  }

  SymbolicStateVector vector_bound(int state, const std::vector<int>& qs, const std::string& br,
                                   const std::vector<ComplexTerm>& values, std::vector<Constraint>& section) {
    SymbolicStateVector v = vector(state, qs, br);
    for (std::size_t i = 0; i < values.size(); ++i) bind(v.amps[i], values[i], section);
    return v;
  }

  // Identity step for a group.
  Snapshot::Group copy(const Snapshot::Group& g, int state, const std::string& br) {
    Snapshot::Group out;
    out.qubits = g.qubits;
    out.is_block = g.is_block;
    if (!g.is_block) {
      out.vec = vector_bound(state, g.qubits, br, g.vec.amps, r_.operations);
      return out;
    }
    const QubitBlock& b = g.block;
    if (!b.canonical) {
      out.block = derived_bound(state, b.qubit, br, {b.alpha, b.beta});
      return out;
    }
    QubitBlock c = canonical(state, b.qubit, br, false);
    r_.operations.push_back(Constraint::eq(c.alpha.re, b.alpha.re));
    r_.operations.push_back(Constraint::eq(c.beta.re, b.beta.re));
    r_.operations.push_back(Constraint::eq(c.beta.im, b.beta.im));
    if (c.phi && b.phi) r_.operations.push_back(Constraint::eq(*c.phi, *b.phi));
    if (c.theta && b.theta) r_.operations.push_back(Constraint::eq(*c.theta, *b.theta));
    out.block = c;
    return out;
  }

  static Snapshot::Group block_group(QubitBlock b) {
    Snapshot::Group g;
    g.qubits = {b.qubit};
    g.is_block = true;
    g.block = std::move(b);
    return g;
  }

  static void finish(Snapshot& s, int n) {
    std::sort(s.groups.begin(), s.groups.end(),
              [](const Snapshot::Group& a, const Snapshot::Group& b) { return a.qubits[0] < b.qubits[0]; });
    s.group_of.assign(n, -1);
    for (std::size_t i = 0; i < s.groups.size(); ++i)
      for (int q : s.groups[i].qubits) s.group_of[q] = static_cast<int>(i);
  }

  Snapshot initial_state() {
    Snapshot s;
    s.state = 0;
    s.bit.assign(p_.n_qubits, -1);
    s.basis.assign(p_.n_qubits, 0);
    for (const auto& init : p_.inits) {
      const int q = init.qubits[0];
      switch (init.kind) {
        case InitSpec::Kind::FullHilbert: s.groups.push_back(block_group(canonical(0, q, ""))); break;
        case InitSpec::Kind::BasisSet: {
          QubitBlock b = canonical(0, q, "");
          std::vector<Constraint> alts;
          for (int bit : init.basis) alts.push_back(pin(b, bit));
          r_.initial.push_back(Constraint::disj(std::move(alts)));
          s.basis[q] = 1;
          if (init.basis.size() == 1) s.bit[q] = static_cast<signed char>(init.basis[0]);
          s.groups.push_back(block_group(std::move(b)));
          break;
        }
        case InitSpec::Kind::Concrete: {
          QubitBlock b = canonical(0, q, "");
          auto [a, c] = strip_phase(init.amps[0], init.amps[1]);
          r_.initial.push_back(Constraint::eq(b.alpha.re, a.real()));
          r_.initial.push_back(Constraint::eq(b.beta.re, c.real()));
          r_.initial.push_back(Constraint::eq(b.beta.im, c.imag()));
          if (std::abs(std::abs(a) - 1.0) < 1e-12) s.bit[q] = 0;
          if (std::abs(std::abs(c) - 1.0) < 1e-12) s.bit[q] = 1;
          s.basis[q] = s.bit[q] >= 0;
          s.groups.push_back(block_group(std::move(b)));
          break;
        }
        case InitSpec::Kind::Joint: {
          std::vector<ComplexTerm> vals;
          for (auto a : init.amps) vals.push_back(ComplexTerm::from(a));
          Snapshot::Group g;
          g.qubits = init.qubits;
          g.is_block = false;
          g.vec = vector_bound(0, init.qubits, "", vals, r_.initial);
          s.groups.push_back(std::move(g));
          break;
        }
      }
    }
    finish(s, p_.n_qubits);
    return s;
  }

  static Constraint pin(const QubitBlock& b, int bit) {
    return Constraint::conj({Constraint::eq(b.alpha.re, bit ? 0.0 : 1.0), Constraint::eq(b.beta.re, bit ? 1.0 : 0.0),
                             Constraint::eq(b.beta.im, 0.0)});
  }

  static GateKind base_kind(const GateSpec& g) {
    if (g.kind == GateKind::CX) return GateKind::X;
    if (g.kind == GateKind::CZ) return GateKind::Z;
    if (g.kind == GateKind::Controlled) return g.base->kind;
    return g.kind;
  }

  static bool diagonal(GateKind k) {
    return k == GateKind::Identity || k == GateKind::Z || k == GateKind::RZ || k == GateKind::Rk;
  }

  // Static knowledge of computational-basis values.
  static void update_flags(Snapshot& nx, const GateSpec& g) {
    const GateKind k = base_kind(g);
    const auto ctr = g.control_qubits();
    const auto tg = g.target_qubits();
    auto clear = [&](int q) {
      nx.bit[q] = -1;
      nx.basis[q] = 0;
    };
    auto act = [&](bool certain) {
      if (k == GateKind::SWAP) {
        if (certain) {
          std::swap(nx.bit[tg[0]], nx.bit[tg[1]]);
          std::swap(nx.basis[tg[0]], nx.basis[tg[1]]);
        } else {
          for (int q : tg) clear(q);
        }
        return;
      }
      for (int q : tg) {
        if (diagonal(k)) continue;
        if (k == GateKind::X) {
          if (!certain) {
            nx.bit[q] = -1;
          } else if (nx.bit[q] >= 0) {
            nx.bit[q] = static_cast<signed char>(1 - nx.bit[q]);
          }
          continue;
        }
        clear(q);
      }
    };
    if (ctr.empty()) {
      act(true);
      return;
    }
    bool all_basis = true, all_known = true, any_zero = false;
    for (int c : ctr) {
      all_basis &= nx.basis[c] != 0;
      all_known &= nx.bit[c] >= 0;
      any_zero |= nx.bit[c] == 0;
    }
    if (any_zero) return;
    if (all_basis) {
      act(all_known);
      return;
    }
    if (diagonal(k)) return;
    for (int q : ctr) clear(q);
    for (int q : tg) clear(q);
  }

  Snapshot step_gate(const Snapshot& cur, const GateSpec& g) {
    const int t = cur.state + 1;
    const std::string& br = cur.branch;
    Snapshot nx;
    nx.state = t;
    nx.branch = br;
    nx.bit = cur.bit;
    nx.basis = cur.basis;
    const auto qs = g.qubits();
    const auto ctr = g.control_qubits();
    const auto tg = g.target_qubits();
    auto m = mapping_for(g);

    bool all_blocks = true, ctrl_basis = true;
    for (int q : qs) all_blocks &= cur.groups[cur.group_of[q]].is_block;
    for (int c : ctr) ctrl_basis &= cur.basis[c] != 0;

    std::vector<char> handled(cur.groups.size(), 0);
    if (m && all_blocks && ctrl_basis) {
      ++r_.mapping_ops;
      bool off = false;
      std::vector<int> unknown;
      for (int c : ctr) {
        if (cur.bit[c] == 0) off = true;
        if (cur.bit[c] < 0) unknown.push_back(c);
      }
      std::vector<QubitAmp> in;
      for (int q : tg) {
        const QubitBlock& b = cur.groups[cur.group_of[q]].block;
        in.push_back({b.alpha, b.beta});
        handled[cur.group_of[q]] = 1;
      }
      if (off) {
        for (int q : tg) nx.groups.push_back(copy(cur.groups[cur.group_of[q]], t, br));
      } else {
        auto out = m->apply(in);
        if (unknown.empty()) {
          for (std::size_t i = 0; i < tg.size(); ++i) nx.groups.push_back(block_group(derived_bound(t, tg[i], br, out[i])));
        } else {
          std::vector<Constraint> on;
          for (int c : unknown) {
            const QubitBlock& b = cur.groups[cur.group_of[c]].block;
            on.push_back(Constraint::le(b.alpha.norm2(), 0.5));
          }
          Constraint guard = Constraint::conj(on);
          for (std::size_t i = 0; i < tg.size(); ++i) {
            QubitBlock b = derived(t, tg[i], br);
            std::vector<Constraint> yes, no;
            bind(b.alpha, out[i].alpha, yes);
            bind(b.beta, out[i].beta, yes);
            bind(b.alpha, in[i].alpha, no);
            bind(b.beta, in[i].beta, no);
            r_.operations.push_back(Constraint::implies(guard, Constraint::conj(yes)));
            r_.operations.push_back(Constraint::implies(Constraint::negation(guard), Constraint::conj(no)));
            nx.groups.push_back(block_group(std::move(b)));
          }
        }
      }
    } else {
      ++r_.matrix_ops;
      GateMatrix u = matrix_for(g);
      std::vector<int> gids;
      for (int q : qs)
        if (std::find(gids.begin(), gids.end(), cur.group_of[q]) == gids.end()) gids.push_back(cur.group_of[q]);
      for (int id : gids) handled[id] = 1;
      if (gids.size() == 1 && cur.groups[gids[0]].is_block) {
        const QubitBlock& b = cur.groups[gids[0]].block;
        auto v = apply_matrix_terms(u, {b.qubit}, qs, {b.alpha, b.beta});
        nx.groups.push_back(block_group(derived_bound(t, b.qubit, br, {v[0], v[1]})));
      } else {
        std::vector<int> uq;
        for (int id : gids) uq.insert(uq.end(), cur.groups[id].qubits.begin(), cur.groups[id].qubits.end());
        std::sort(uq.begin(), uq.end());
        std::vector<ComplexTerm> amps;
        if (gids.size() == 1) {
          amps = cur.groups[gids[0]].vec.amps;
        } else {
          ++r_.tensor_merges;
          amps = vector_bound(cur.state, uq, br, merged_terms(cur, gids, uq), r_.operations).amps;
        }
        Snapshot::Group g2;
        g2.qubits = uq;
        g2.is_block = false;
        g2.vec = vector_bound(t, uq, br, apply_matrix_terms(u, uq, qs, amps), r_.operations);
        nx.groups.push_back(std::move(g2));
      }
    }
    for (std::size_t i = 0; i < cur.groups.size(); ++i)
      if (!handled[i]) nx.groups.push_back(copy(cur.groups[i], t, br));
    finish(nx, p_.n_qubits);
    update_flags(nx, g);
    return nx;
  }

  // Product state of several groups over the sorted union uq.
  static std::vector<ComplexTerm> merged_terms(const Snapshot& cur, const std::vector<int>& gids,
                                               const std::vector<int>& uq) {
    const std::size_t w = uq.size();
    std::vector<ComplexTerm> out(std::size_t{1} << w);
    for (std::size_t i = 0; i < out.size(); ++i) {
      ComplexTerm acc{1.0, 0.0};
      bool first = true;
      for (int id : gids) {
        const auto& g = cur.groups[id];
        std::size_t sub = 0;
        for (int q : g.qubits) sub = sub << 1 | bit_of(i, position(uq, q), w);
        const ComplexTerm& f = g.is_block ? (sub ? g.block.beta : g.block.alpha) : g.vec.amps[sub];
        acc = first ? f : acc * f;
        first = false;
      }
      out[i] = acc;
    }
    return out;
  }

  std::pair<std::vector<Snapshot>, std::vector<RealTerm>> step_measure(const Snapshot& cur, const std::vector<int>& mq) {
    const int t = cur.state + 1;
    std::vector<Snapshot> outs;
    std::vector<RealTerm> probs;
    for (const std::string& x : branch_labels(static_cast<int>(mq.size()))) {
      std::vector<int> outcome;
      for (char c : x) outcome.push_back(c - '0');
      const std::string br = cur.branch + x;
      Snapshot nx;
      nx.state = t;
      nx.branch = br;
      nx.bit = cur.bit;
      nx.basis = cur.basis;
      RealTerm prob(1.0);
      for (const auto& g : cur.groups) {
        std::vector<int> here, bits;
        for (std::size_t i = 0; i < mq.size(); ++i)
          if (std::find(g.qubits.begin(), g.qubits.end(), mq[i]) != g.qubits.end()) {
            here.push_back(mq[i]);
            bits.push_back(outcome[i]);
          }
        if (here.empty()) {
          nx.groups.push_back(copy(g, t, br));
          continue;
        }
        for (std::size_t i = 0; i < here.size(); ++i) {
          QubitBlock b = canonical(t, here[i], br);
          r_.operations.push_back(pin(b, bits[i]));
          nx.groups.push_back(block_group(std::move(b)));
          nx.bit[here[i]] = static_cast<signed char>(bits[i]);
          nx.basis[here[i]] = 1;
        }
        if (g.is_block) {
          prob = prob * (bits[0] ? g.block.beta.norm2() : g.block.alpha.norm2());
          continue;
        }
        auto rest_amps = project_terms(g.qubits, g.vec.amps, here, bits);
        std::vector<int> rest;
        for (int q : g.qubits)
          if (std::find(here.begin(), here.end(), q) == here.end()) rest.push_back(q);
        RealTerm mass(0.0);
        for (const auto& a : rest_amps) mass = mass + a.norm2();
        prob = prob * mass;
        if (rest.size() == 1) {
          nx.groups.push_back(block_group(derived_bound(t, rest[0], br, {rest_amps[0], rest_amps[1]})));
        } else if (rest.size() > 1) {
          Snapshot::Group v;
          v.qubits = rest;
          v.is_block = false;
          v.vec = vector_bound(t, rest, br, rest_amps, r_.operations);
          nx.groups.push_back(std::move(v));
        }
      }
      finish(nx, p_.n_qubits);
      outs.push_back(std::move(nx));
      probs.push_back(prob);
    }
    return {std::move(outs), std::move(probs)};
  }

  const ProgramModel& p_;
  EncodeOptions o_;
  EncodingResult r_;
  std::vector<Key> decls_;
};

EncodingResult encode(const ProgramModel& p, const EncodeOptions& opts) { return Encoder(p, opts).run(); }

}  // namespace qvsmt
