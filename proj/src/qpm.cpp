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


#include "qvsmt/qpm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qvsmt/smtlib.hpp"

namespace qvsmt {

std::pair<std::complex<double>, std::complex<double>> strip_phase(std::complex<double> a, std::complex<double> b) {
  if (std::abs(a) > 0) {
    const std::complex<double> ph = std::conj(a) / std::abs(a);
    return {std::abs(a), b * ph};  // a * ph leaves ~1e-17 in the imaginary part
  }
  return {0.0, std::abs(b)};
}

GateSpec GateSpec::rx(int q, RealTerm theta) {
  GateSpec g = single(GateKind::RX, q);
  g.param = std::move(theta);
  return g;
}

GateSpec GateSpec::rz(int q, RealTerm phi) {
  GateSpec g = single(GateKind::RZ, q);
  g.param = std::move(phi);
  return g;
}

GateSpec GateSpec::rk(int q, RealTerm k) {
  GateSpec g = single(GateKind::Rk, q);
  g.param = std::move(k);
  return g;
}

GateSpec GateSpec::swap(int a, int b) {
  GateSpec g;
  g.kind = GateKind::SWAP;
  g.targets = {a, b};
  return g;
}

GateSpec GateSpec::cx(int control, int target) {
  GateSpec g;
  g.kind = GateKind::CX;
  g.targets = {control, target};
  return g;
}

GateSpec GateSpec::cz(int control, int target) {
  GateSpec g;
  g.kind = GateKind::CZ;
  g.targets = {control, target};
  return g;
}

GateSpec GateSpec::custom(std::vector<int> targets, std::vector<ComplexTerm> matrix) {
  GateSpec g;
  g.kind = GateKind::Custom;
  g.targets = std::move(targets);
  g.matrix = std::move(matrix);
  return g;
}

GateSpec GateSpec::controlled(const GateSpec& base, std::vector<int> controls) {
  GateSpec g;
  g.kind = GateKind::Controlled;
  g.controls = std::move(controls);
  if (base.kind == GateKind::CX || base.kind == GateKind::CZ) {
    g.controls.push_back(base.targets[0]);
    g.base = std::make_shared<GateSpec>(base.kind == GateKind::CX ? x(base.targets[1]) : z(base.targets[1]));
  } else if (base.kind == GateKind::Controlled) {
    g.controls.insert(g.controls.end(), base.controls.begin(), base.controls.end());
    g.base = base.base;
  } else {
    g.base = std::make_shared<GateSpec>(base);
  }
  return g;
}

std::vector<int> GateSpec::control_qubits() const {
  if (kind == GateKind::CX || kind == GateKind::CZ) return {targets[0]};
  if (kind == GateKind::Controlled) return controls;
  return {};
}

std::vector<int> GateSpec::target_qubits() const {
  if (kind == GateKind::CX || kind == GateKind::CZ) return {targets[1]};
  if (kind == GateKind::Controlled) return base->targets;
  return targets;
}

std::vector<int> GateSpec::qubits() const {
  std::vector<int> q = control_qubits();
  auto t = target_qubits();
  q.insert(q.end(), t.begin(), t.end());
  return q;
}

std::string GateSpec::name() const {
  switch (kind) {
    case GateKind::Identity: return "id";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::H: return "h";
    case GateKind::RX: return "rx";
    case GateKind::RZ: return "rz";
    case GateKind::Rk: return "rk";
    case GateKind::SWAP: return "swap";
    case GateKind::CX: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::Custom: return "custom";
    case GateKind::Controlled: return std::string(controls.size(), 'c') + base->name();
  }
  return "?";
}

std::set<int> touched_qubits(const StateOp& op) {
  if (op.kind == StateOp::Kind::Measure) return {op.measured.begin(), op.measured.end()};
  auto q = op.gate.qubits();
  return {q.begin(), q.end()};
}

std::string param_var(const std::string& name) { return "param_" + name; }
RealTerm param(const std::string& name) { return RealTerm::var(param_var(name)); }

InitSpec InitSpec::full(int q) {
  InitSpec s;
  s.qubits = {q};
  return s;
}

InitSpec InitSpec::basis_set(int q, std::vector<int> bits) {
  InitSpec s;
  s.kind = Kind::BasisSet;
  s.qubits = {q};
  s.basis = std::move(bits);
  return s;
}

InitSpec InitSpec::concrete(int q, std::complex<double> a, std::complex<double> b) {
  InitSpec s;
  s.kind = Kind::Concrete;
  s.qubits = {q};
  s.amps = {a, b};
  return s;
}

InitSpec InitSpec::joint(std::vector<int> qs, std::vector<std::complex<double>> amps) {
  InitSpec s;
  s.kind = Kind::Joint;
  s.qubits = std::move(qs);
  s.amps = std::move(amps);
  return s;
}

InitSpec InitSpec::bell(int a, int b) {
  const double r = 1.0 / std::sqrt(2.0);
  return joint({a, b}, {r, 0.0, 0.0, r});
}

int ProgramModel::measured_count() const { return measured_before(static_cast<int>(ops.size())); }

int ProgramModel::measured_before(int op_index) const {
  int k = 0;
  for (int i = 0; i < op_index; ++i)
    if (ops[i].kind == StateOp::Kind::Measure) k += static_cast<int>(ops[i].measured.size());
  return k;
}

namespace {

using Code = ModelError::Code;

void check_qubits(const std::vector<int>& qs, int n, const std::string& what) {
  std::set<int> seen;
  for (int q : qs) {
    if (q < 0 || q >= n) throw ModelError(Code::IndexOutOfRange, what + ": qubit " + std::to_string(q) + " out of range");
    if (!seen.insert(q).second) throw ModelError(Code::DuplicateTarget, what + ": qubit " + std::to_string(q) + " repeated");
  }
}

void check_params(const RealTerm& t, const std::set<std::string>& names, const std::string& what) {
  std::set<std::string> vs;
  collect_vars(t, vs);
  for (const auto& v : vs)
    if (!names.count(v)) throw ModelError(Code::UnboundParameter, what + ": unbound parameter " + v);
}

bool constant_unitary(const std::vector<ComplexTerm>& m, std::size_t dim, bool& is_const) {
  std::vector<std::complex<double>> u(m.size());
  is_const = true;
  try {
    for (std::size_t i = 0; i < m.size(); ++i) u[i] = evaluate(m[i], Valuation{});
  } catch (const EvalError&) {
    is_const = false;
    return true;
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      std::complex<double> s = 0;
      for (std::size_t k = 0; k < dim; ++k) s += std::conj(u[k * dim + i]) * u[k * dim + j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-9) return false;
    }
  return true;
}

void check_gate(const GateSpec& g, int n, const std::set<std::string>& pnames) {
  const std::string what = g.name();
  check_qubits(g.qubits(), n, what);
  std::size_t want = 1;
  switch (g.kind) {
    case GateKind::SWAP:
    case GateKind::CX:
    case GateKind::CZ: want = 2; break;
    case GateKind::Custom: want = g.targets.size(); break;
    case GateKind::Controlled:
      if (g.controls.empty()) throw ModelError(Code::BadMatrix, "controlled gate without controls");
      check_gate(*g.base, n, pnames);
      return;
    default: break;
  }
  if (g.targets.size() != want || want == 0)
    throw ModelError(Code::IndexOutOfRange, what + ": wrong number of targets");
  if (g.kind == GateKind::RX || g.kind == GateKind::RZ || g.kind == GateKind::Rk) check_params(g.param, pnames, what);
  if (g.kind == GateKind::Custom) {
    std::size_t dim = std::size_t{1} << g.targets.size();
    if (g.matrix.size() != dim * dim) throw ModelError(Code::BadMatrix, "custom matrix has wrong dimension");
    for (const auto& e : g.matrix) {
      check_params(e.re, pnames, what);
      check_params(e.im, pnames, what);
    }
    bool is_const = false;
    if (!constant_unitary(g.matrix, dim, is_const)) throw ModelError(Code::BadMatrix, "custom matrix is not unitary");
  }
}

}  // namespace

ProgramModel build_program(int n_qubits, std::vector<StateOp> ops, std::vector<Param> params,
                           std::vector<InitSpec> inits) {
  if (n_qubits <= 0) throw ModelError(Code::IndexOutOfRange, "need at least one qubit");
  std::set<std::string> pnames;
  for (const auto& p : params) {
    if (!pnames.insert(param_var(p.name)).second)
      throw ModelError(Code::UnboundParameter, "parameter " + p.name + " declared twice");
  }
  for (const auto& op : ops) {
    if (op.kind == StateOp::Kind::Measure) {
      if (op.measured.empty()) throw ModelError(Code::BadMeasure, "empty measurement");
      check_qubits(op.measured, n_qubits, "measure");
    } else {
      check_gate(op.gate, n_qubits, pnames);
    }
  }

  ProgramModel p;
  p.n_qubits = n_qubits;
  p.ops = std::move(ops);
  p.params = std::move(params);
  p.init_of.assign(n_qubits, -1);
  std::vector<InitSpec> all;
  for (auto& s : inits) {
    if (s.qubits.empty()) throw ModelError(Code::BadInitial, "initial valuation without qubits");
    check_qubits(s.qubits, n_qubits, "init");
    for (int q : s.qubits) {
      if (p.init_of[q] != -1) throw ModelError(Code::BadInitial, "qubit " + std::to_string(q) + " initialised twice");
      p.init_of[q] = 0;
    }
    switch (s.kind) {
      case InitSpec::Kind::FullHilbert:
        if (s.qubits.size() != 1) throw ModelError(Code::BadInitial, "full takes one qubit");
        break;
      case InitSpec::Kind::BasisSet: {
        if (s.qubits.size() != 1 || s.basis.empty()) throw ModelError(Code::BadInitial, "basis takes one qubit and bits");
        std::sort(s.basis.begin(), s.basis.end());
        s.basis.erase(std::unique(s.basis.begin(), s.basis.end()), s.basis.end());
        for (int b : s.basis)
          if (b != 0 && b != 1) throw ModelError(Code::BadInitial, "basis bits must be 0 or 1");
        break;
      }
      case InitSpec::Kind::Concrete:
      case InitSpec::Kind::Joint: {
        std::size_t dim = std::size_t{1} << s.qubits.size();
        if (s.kind == InitSpec::Kind::Concrete && s.qubits.size() != 1)
          throw ModelError(Code::BadInitial, "ket takes one qubit");
        if (s.amps.size() != dim) throw ModelError(Code::BadInitial, "amplitude count must be 2^k");
        for (std::size_t i = 1; i < s.qubits.size(); ++i)
          if (s.qubits[i] != s.qubits[i - 1] + 1) throw ModelError(Code::BadInitial, "joint qubits must be contiguous");
        double norm = 0;
        for (auto a : s.amps) norm += std::norm(a);
        if (std::abs(norm - 1.0) > 1e-9) throw ModelError(Code::BadInitial, "initial state is not normalised");
        break;
      }
    }
    all.push_back(std::move(s));
  }
  for (int q = 0; q < n_qubits; ++q)
    if (p.init_of[q] == -1) all.push_back(InitSpec::full(q));
  std::sort(all.begin(), all.end(), [](const InitSpec& a, const InitSpec& b) { return a.qubits[0] < b.qubits[0]; });
  for (std::size_t i = 0; i < all.size(); ++i)
    for (int q : all[i].qubits) p.init_of[q] = static_cast<int>(i);
  p.inits = std::move(all);
  return p;
}

std::vector<std::string> branch_labels(int measured) {
  std::vector<std::string> out;
  const std::size_t count = std::size_t{1} << measured;
  out.reserve(count);
  for (std::size_t x = 0; x < count; ++x) {
    std::string s(measured, '0');
    for (int b = 0; b < measured; ++b)
      if (x >> (measured - 1 - b) & 1u) s[b] = '1';
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> branch_labels(const ProgramModel& p) { return branch_labels(p.measured_count()); }

// --- text form ---------------------------------------------------------------

namespace {

int as_int(const SExpr& e) {
  double v;
  if (!e.is_atom || !parse_number(e.atom, v) || v != std::floor(v)) throw ParseError("expected an integer", e.line);
  return static_cast<int>(v);
}

double as_real(const SExpr& e) {
  double v;
  if (!e.is_atom || !parse_number(e.atom, v)) throw ParseError("expected a number", e.line);
  return v;
}

RealTerm as_expr(const SExpr& e) {
  return parse_term(e, [](const std::string& s) -> std::optional<RealTerm> { return param(s); });
}

std::string expr_text(const RealTerm& t) {
  RealTerm u = substitute(t, [](const std::string& v) -> std::optional<RealTerm> {
    if (v.rfind("param_", 0) == 0) return RealTerm::var(v.substr(6));
    return std::nullopt;
  });
  return to_smtlib(u);
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (int q : v) s += " " + std::to_string(q);
  return s;
}

}  // namespace

ProgramModel parse_qpm(std::string_view text) {
  int n = -1;
  std::vector<StateOp> ops;
  std::vector<Param> params;
  std::vector<InitSpec> inits;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::vector<SExpr> tok;
    try {
      tok = parse_sexprs(line);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (tok.empty()) continue;
    for (auto& t : tok) t.line = line_no;
    if (!tok[0].is_atom) throw ParseError("expected a keyword", line_no);
    const std::string cmd = tok[0].atom;
    auto need = [&](std::size_t k) {
      if (tok.size() < k) throw ParseError("'" + cmd + "' needs more arguments", line_no);
    };

    if (cmd == "qubits") {
      need(2);
      n = as_int(tok[1]);
      continue;
    }
    if (cmd == "param") {
      need(2);
      Param p;
      p.name = tok[1].atom;
      if (tok.size() >= 4) {
        p.lo = as_real(tok[2]);
        p.hi = as_real(tok[3]);
        p.hi_open = tok.size() >= 5 && tok[4].atom == "open";
      }
      params.push_back(std::move(p));
      continue;
    }
    if (cmd == "init") {
      std::vector<int> qs;
      std::size_t k = 1;
      double v;
      while (k < tok.size() && tok[k].is_atom && parse_number(tok[k].atom, v)) qs.push_back(as_int(tok[k++]));
      if (qs.empty() || k >= tok.size()) throw ParseError("init needs qubits and a kind", line_no);
      const std::string kind = tok[k++].atom;
      std::vector<double> nums;
      for (; k < tok.size(); ++k) nums.push_back(as_real(tok[k]));
      if (kind == "full") {
        for (int q : qs) inits.push_back(InitSpec::full(q));
      } else if (kind == "basis") {
        std::vector<int> bits(nums.begin(), nums.end());
        for (int q : qs) inits.push_back(InitSpec::basis_set(q, bits));
      } else if (kind == "ket") {
        if (nums.size() != 4 || qs.size() != 1) throw ParseError("ket takes one qubit and 4 reals", line_no);
        inits.push_back(InitSpec::concrete(qs[0], {nums[0], nums[1]}, {nums[2], nums[3]}));
      } else if (kind == "bell") {
        if (qs.size() != 2) throw ParseError("bell takes two qubits", line_no);
        inits.push_back(InitSpec::bell(qs[0], qs[1]));
      } else if (kind == "joint") {
        if (nums.size() % 2) throw ParseError("joint takes re/im pairs", line_no);
        std::vector<std::complex<double>> amps;
        for (std::size_t i = 0; i < nums.size(); i += 2) amps.emplace_back(nums[i], nums[i + 1]);
        inits.push_back(InitSpec::joint(qs, std::move(amps)));
      } else {
        throw ParseError("unknown init kind '" + kind + "'", line_no);
      }
      continue;
    }
    if (cmd == "measure") {
      std::vector<int> qs;
      for (std::size_t k = 1; k < tok.size(); ++k) qs.push_back(as_int(tok[k]));
      ops.push_back(StateOp::measure(std::move(qs)));
      continue;
    }

    // gates, with an optional trailing `ctrl c...`
    std::size_t ctrl_at = tok.size();
    for (std::size_t k = 1; k < tok.size(); ++k)
      if (tok[k].is_atom && tok[k].atom == "ctrl") ctrl_at = k;
    std::vector<int> ctrls;
    for (std::size_t k = ctrl_at + 1; k < tok.size(); ++k) ctrls.push_back(as_int(tok[k]));
    std::vector<SExpr> args(tok.begin() + 1, tok.begin() + static_cast<long>(ctrl_at));
    auto arity = [&](std::size_t k) {
      if (args.size() != k) throw ParseError("'" + cmd + "' takes " + std::to_string(k) + " arguments", line_no);
    };
    GateSpec g;
    if (cmd == "id" || cmd == "i" || cmd == "x" || cmd == "z" || cmd == "h") {
      arity(1);
      int q = as_int(args[0]);
      g = cmd == "x" ? GateSpec::x(q) : cmd == "z" ? GateSpec::z(q) : cmd == "h" ? GateSpec::h(q) : GateSpec::id(q);
    } else if (cmd == "rx" || cmd == "rz") {
      arity(2);
      g = cmd == "rx" ? GateSpec::rx(as_int(args[0]), as_expr(args[1])) : GateSpec::rz(as_int(args[0]), as_expr(args[1]));
    } else if (cmd == "rk") {
      arity(2);
      g = GateSpec::rk(as_int(args[1]), as_expr(args[0]));
    } else if (cmd == "swap" || cmd == "cx" || cmd == "cz") {
      arity(2);
      int a = as_int(args[0]), b = as_int(args[1]);
      g = cmd == "swap" ? GateSpec::swap(a, b) : cmd == "cx" ? GateSpec::cx(a, b) : GateSpec::cz(a, b);
    } else if (cmd == "ccx" || cmd == "ccz") {
      arity(3);
      GateSpec base = cmd == "ccx" ? GateSpec::x(as_int(args[2])) : GateSpec::z(as_int(args[2]));
      g = GateSpec::controlled(base, {as_int(args[0]), as_int(args[1])});
    } else {
      throw ParseError("unknown operation '" + cmd + "'", line_no);
    }
    if (!ctrls.empty()) g = GateSpec::controlled(g, ctrls);
    ops.push_back(StateOp::apply(std::move(g)));
  }
  if (n < 0) throw ParseError("missing 'qubits' line", 1);
  return build_program(n, std::move(ops), std::move(params), std::move(inits));
}

std::string to_qpm(const ProgramModel& p) {
  std::ostringstream os;
  os << "qubits " << p.n_qubits << "\n";
  for (const auto& pr : p.params) {
    os << "param " << pr.name;
    if (pr.lo && pr.hi) os << " " << format_decimal(*pr.lo) << " " << format_decimal(*pr.hi) << (pr.hi_open ? " open" : "");
    os << "\n";
  }
  for (const auto& s : p.inits) {
    os << "init" << join(s.qubits);
    switch (s.kind) {
      case InitSpec::Kind::FullHilbert: os << " full"; break;
      case InitSpec::Kind::BasisSet: os << " basis" << join(s.basis); break;
      case InitSpec::Kind::Concrete:
      case InitSpec::Kind::Joint:
        os << (s.kind == InitSpec::Kind::Concrete ? " ket" : " joint");
        for (auto a : s.amps) os << " " << format_decimal(a.real()) << " " << format_decimal(a.imag());
        break;
    }
    os << "\n";
  }
  for (const auto& op : p.ops) {
    if (op.kind == StateOp::Kind::Measure) {
      os << "measure" << join(op.measured) << "\n";
      continue;
    }
    const GateSpec& g = op.gate;
    const GateSpec& b = g.kind == GateKind::Controlled ? *g.base : g;
    switch (b.kind) {
      case GateKind::RX:
      case GateKind::RZ: os << b.name() << " " << b.targets[0] << " " << expr_text(b.param); break;
      case GateKind::Rk: os << "rk " << expr_text(b.param) << " " << b.targets[0]; break;
      case GateKind::Custom: os << "# custom matrix gate on" << join(b.targets); break;
      default: os << b.name() << join(b.targets); break;
    }
    if (g.kind == GateKind::Controlled) os << " ctrl" << join(g.controls);
    os << "\n";
  }
  return os.str();
}

}  // namespace qvsmt
