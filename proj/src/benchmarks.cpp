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


#include "qvsmt/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace qvsmt {

namespace {

using Ops = std::vector<StateOp>;

StateOp g(GateSpec s) { return StateOp::apply(std::move(s)); }

RealTerm p_one(int state, int qubit) {
  RealTerm br = ref(Role::BetaRe, state, qubit), bi = ref(Role::BetaIm, state, qubit);
  return br * br + bi * bi;
}

void need_mutation(const std::string& name, const std::string& m) {
  if (m.empty()) return;
  auto ms = mutations_for(name);
  if (std::find(ms.begin(), ms.end(), m) == ms.end()) throw std::invalid_argument("unknown mutation '" + m + "' for " + name);
}

void need_size(const std::string& name, int n, int lo, int hi) {
  if (n < lo || n > hi)
    throw UnsupportedSize(name + " size " + std::to_string(n) + " outside " + std::to_string(lo) + ".." +
                          std::to_string(hi));
}

Benchmark toffoli(const std::string& m) {
  Ops ops = {g(GateSpec::x(2)), g(GateSpec::h(2)), g(GateSpec::controlled(GateSpec::z(2), {0, 1})),
             g(GateSpec::h(2)), g(GateSpec::x(2))};
  if (m == "drop-x") ops.pop_back();
  std::vector<InitSpec> inits;
  for (int q = 0; q < 3; ++q) inits.push_back(InitSpec::basis_set(q, {0, 1}));
  Benchmark b;
  b.program = build_program(3, std::move(ops), {}, std::move(inits));
  const int f = b.program.state_count() - 1;
  b.spec.formula = SpecFormula::all({
      SpecFormula::qubit_eq(QubitTarget::q(f, 0), QubitTarget::q(0, 0)),
      SpecFormula::qubit_eq(QubitTarget::q(f, 1), QubitTarget::q(0, 1)),
      SpecFormula::ite(SpecFormula::all({bit_is_one(0, 0), bit_is_one(0, 1)}),
                       SpecFormula::qubit_eq(QubitTarget::q(f, 2), QubitTarget::flip(0, 2)),
                       SpecFormula::qubit_eq(QubitTarget::q(f, 2), QubitTarget::q(0, 2))),
  });
  return b;
}

Benchmark teleport(const std::string& m) {
  Ops ops = {g(GateSpec::cx(0, 1)), g(GateSpec::h(0)), StateOp::measure({0, 1}), g(GateSpec::cx(1, 2)),
             g(GateSpec::cz(0, 2))};
  if (m == "drop-cz") ops.pop_back();
  if (m == "drop-cx") ops.erase(ops.begin() + 3);
  Benchmark b;
  b.program = build_program(3, std::move(ops), {}, {InitSpec::full(0), InitSpec::bell(1, 2)});
  const int f = b.program.state_count() - 1;
  b.spec.formula = SpecFormula::qubit_eq(QubitTarget::q(f, 2), QubitTarget::q(0, 0));
  b.spec.rules.push_back(StructuralRule{StructuralRule::Kind::ForbidJointTouch, {0, 1}, {2}, -1});
  return b;
}

// Cuccaro ripple-carry adder: qubit 0 carry-in, then (b_i, a_i) pairs from
// the least significant bit, last qubit carry-out. b receives the sum.
Benchmark adder(int n, const std::string&) {
  auto bq = [](int i) { return 1 + 2 * i; };
  auto aq = [](int i) { return 2 + 2 * i; };
  const int z = 2 * n + 1;
  Ops ops;
  auto maj = [&](int c, int b, int a) {
    ops.push_back(g(GateSpec::cx(a, b)));
    ops.push_back(g(GateSpec::cx(a, c)));
    ops.push_back(g(GateSpec::controlled(GateSpec::x(a), {c, b})));
  };
  auto uma = [&](int c, int b, int a) {
    ops.push_back(g(GateSpec::controlled(GateSpec::x(a), {c, b})));
    ops.push_back(g(GateSpec::cx(a, c)));
    ops.push_back(g(GateSpec::cx(c, b)));
  };
  maj(0, bq(0), aq(0));
  for (int i = 1; i < n; ++i) maj(aq(i - 1), bq(i), aq(i));
  ops.push_back(g(GateSpec::cx(aq(n - 1), z)));
  for (int i = n - 1; i >= 1; --i) uma(aq(i - 1), bq(i), aq(i));
  uma(0, bq(0), aq(0));

  std::vector<InitSpec> inits = {InitSpec::concrete(0, 1.0, 0.0)};
  for (int i = 0; i < n; ++i) {
    inits.push_back(InitSpec::basis_set(bq(i), {0, 1}));
    inits.push_back(InitSpec::basis_set(aq(i), {0, 1}));
  }
  inits.push_back(InitSpec::concrete(z, 1.0, 0.0));
  Benchmark b;
  b.program = build_program(2 * n + 2, std::move(ops), {}, std::move(inits));
  const int f = b.program.state_count() - 1;
  RealTerm lhs(0.0), rhs(0.0);
  std::vector<SpecFormula> parts;
  for (int i = 0; i < n; ++i) {
    const double w = std::ldexp(1.0, i);
    lhs = lhs + RealTerm(w) * p_one(f, bq(i));
    rhs = rhs + RealTerm(w) * (p_one(0, aq(i)) + p_one(0, bq(i)));
    parts.push_back(SpecFormula::cmp(Rel::Eq, p_one(f, aq(i)), p_one(0, aq(i))));
  }
  lhs = lhs + RealTerm(std::ldexp(1.0, n)) * p_one(f, z);
  parts.push_back(SpecFormula::cmp(Rel::Eq, lhs, rhs));
  parts.push_back(SpecFormula::cmp(Rel::Eq, p_one(f, 0), 0.0));
  b.spec.formula = SpecFormula::all(std::move(parts));
  return b;
}

// H on qubit i followed by R_k controlled by qubit i+k-1, no final swaps.
void qft_ops(Ops& ops, const std::vector<int>& qs) {
  const int n = static_cast<int>(qs.size());
  for (int i = 0; i < n; ++i) {
    ops.push_back(g(GateSpec::h(qs[i])));
    for (int j = i + 1; j < n; ++j) ops.push_back(g(GateSpec::controlled(GateSpec::rk(qs[i], j - i + 1), {qs[j]})));
  }
}

void inverse_qft_ops(Ops& ops, const std::vector<int>& qs) {
  const int n = static_cast<int>(qs.size());
  for (int i = n - 1; i >= 0; --i) {
    for (int j = n - 1; j > i; --j) {
      const double angle = -2.0 * std::numbers::pi * std::ldexp(1.0, -(j - i + 1));
      ops.push_back(g(GateSpec::controlled(GateSpec::rz(qs[i], angle), {qs[j]})));
    }
    ops.push_back(g(GateSpec::h(qs[i])));
  }
}

Benchmark qft(int n, const std::string&) {
  Ops ops;
  std::vector<int> qs(n);
  for (int i = 0; i < n; ++i) qs[i] = i;
  qft_ops(ops, qs);
  std::vector<InitSpec> inits;
  for (int q = 0; q < n; ++q) inits.push_back(InitSpec::basis_set(q, {0, 1}));
  Benchmark b;
  b.program = build_program(n, std::move(ops), {}, std::move(inits));
  const int f = b.program.state_count() - 1;
  const double s = std::numbers::sqrt2 / 2.0;
  std::vector<SpecFormula> cases;
  for (int x = 0; x < (1 << n); ++x) {
    std::vector<SpecFormula> guard, out;
    for (int j = 0; j < n; ++j) {
      const bool one = (x >> (n - 1 - j)) & 1;
      guard.push_back(one ? bit_is_one(0, j) : SpecFormula::negation(bit_is_one(0, j)));
    }
    for (int i = 0; i < n; ++i) {
      // 0.x_i ... x_n as a binary fraction
      double frac = 0.0;
      for (int j = i; j < n; ++j)
        if ((x >> (n - 1 - j)) & 1) frac += std::ldexp(1.0, -(j - i + 1));
      const std::complex<double> b1 = s * std::polar(1.0, 2.0 * std::numbers::pi * frac);
      out.push_back(SpecFormula::qubit_eq(QubitTarget::q(f, i), QubitTarget::ket(s, b1)));
    }
    cases.push_back(SpecFormula::implies(SpecFormula::all(std::move(guard)), SpecFormula::all(std::move(out))));
  }
  b.spec.formula = SpecFormula::all(std::move(cases));
  return b;
}

// Counting qubits 0..n-1 (qubit 0 most significant), eigenstate qubit n in
// |1>, phase 2*pi*theta with theta in [0, 1).
Benchmark qpe(int n, const std::string&) {
  Ops ops;
  for (int q = 0; q < n; ++q) ops.push_back(g(GateSpec::h(q)));
  const RealTerm theta = param("theta");
  for (int q = 0; q < n; ++q) {
    RealTerm angle = RealTerm(2.0 * std::ldexp(1.0, n - 1 - q)) * RealTerm::pi() * theta;
    ops.push_back(g(GateSpec::controlled(GateSpec::rz(n, angle), {q})));
  }
  for (int q = 0; q < n / 2; ++q) ops.push_back(g(GateSpec::swap(q, n - 1 - q)));
  std::vector<int> qs(n);
  for (int i = 0; i < n; ++i) qs[i] = i;
  inverse_qft_ops(ops, qs);
  std::vector<InitSpec> inits;
  for (int q = 0; q < n; ++q) inits.push_back(InitSpec::concrete(q, 1.0, 0.0));
  inits.push_back(InitSpec::concrete(n, 0.0, 1.0));
  Benchmark b;
  b.program = build_program(n + 1, std::move(ops), {Param{"theta", 0.0, 1.0, true}}, std::move(inits));
  const int f = b.program.state_count() - 1;
  const int states = 1 << n;
  const double half = std::ldexp(1.0, -(n + 1));
  const double bound = 4.0 / (std::numbers::pi * std::numbers::pi);
  std::vector<SpecFormula> cases;
  for (int a = 0; a < states; ++a) {
    const double c = static_cast<double>(a) / states;
    SpecFormula window =
        a == 0 ? SpecFormula::any({SpecFormula::cmp(Rel::Le, theta, half), SpecFormula::cmp(Rel::Ge, theta, 1.0 - half)})
               : SpecFormula::all({SpecFormula::cmp(Rel::Ge, theta, c - half), SpecFormula::cmp(Rel::Le, theta, c + half)});
    const int idx = 2 * a + 1;
    RealTerm re = ref(Role::AmpRe, f, idx), im = ref(Role::AmpIm, f, idx);
    cases.push_back(SpecFormula::implies(window, SpecFormula::cmp(Rel::Ge, re * re + im * im, bound)));
  }
  b.spec.formula = SpecFormula::all(std::move(cases));
  return b;
}

// Reflection about the uniform superposition, up to global sign:
// out = in - 2 <u|in> u. Where the input amplitude is non-positive and the
// amplitude sum is non-negative, the output amplitude does not increase.
Benchmark gdo(int n, const std::string& m) {
  Ops ops;
  for (int q = 0; q < n; ++q) ops.push_back(g(GateSpec::h(q)));
  for (int q = 0; q < n; ++q) ops.push_back(g(GateSpec::x(q)));
  std::vector<int> controls;
  for (int q = 1; q < n; ++q) controls.push_back(q);
  ops.push_back(g(GateSpec::controlled(GateSpec::z(0), controls)));
  for (int q = 0; q < n; ++q) ops.push_back(g(GateSpec::x(q)));
  for (int q = 0; q < n; ++q) ops.push_back(g(GateSpec::h(q)));
  if (m == "sign-flip") {
    // X Z X Z = -I
    for (auto s : {GateSpec::x(0), GateSpec::z(0), GateSpec::x(0), GateSpec::z(0)}) ops.push_back(g(s));
  }
  std::vector<InitSpec> inits;
  for (int q = 0; q < n; ++q) inits.push_back(InitSpec::full(q));
  Benchmark b;
  b.mode = Mode::Box;
  b.program = build_program(n, std::move(ops), {}, std::move(inits));
  const int f = b.program.state_count() - 1;
  const int dim = 1 << n;
  RealTerm sum(0.0);
  for (int i = 0; i < dim; ++i) sum = sum + ref(Role::AmpRe, 0, i);
  std::vector<SpecFormula> parts;
  for (int i = 0; i < dim; ++i) {
    SpecFormula guard = SpecFormula::all(
        {SpecFormula::cmp(Rel::Le, ref(Role::AmpRe, 0, i), 0.0), SpecFormula::cmp(Rel::Ge, sum, 0.0)});
    parts.push_back(
        SpecFormula::implies(guard, SpecFormula::cmp(Rel::Le, ref(Role::AmpRe, f, i), ref(Role::AmpRe, 0, i))));
  }
  b.spec.formula = SpecFormula::all(std::move(parts));
  return b;
}

}  // namespace

SpecFormula bit_is_one(int state, int qubit, const std::string& branch) {
  RealTerm br = ref(Role::BetaRe, state, qubit, branch), bi = ref(Role::BetaIm, state, qubit, branch);
  return SpecFormula::cmp(Rel::Ge, br * br + bi * bi, 0.5);
}

std::vector<std::string> benchmark_names() { return {"toffoli", "tp", "add", "qft", "qpe", "gdo"}; }

std::vector<std::string> mutations_for(const std::string& name) {
  if (name == "tp") return {"drop-cz", "drop-cx"};
  if (name == "toffoli") return {"drop-x"};
  if (name == "gdo") return {"sign-flip"};
  return {};
}

int default_size(const std::string& name) {
  // add-8 takes the bundled solver well past ten minutes
  if (name == "add" || name == "qft" || name == "qpe" || name == "gdo") return 3;
  return 0;
}

Benchmark generate(const std::string& name, int size, const std::string& mutation) {
  const auto names = benchmark_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw std::invalid_argument("unknown benchmark '" + name + "'");
  need_mutation(name, mutation);
  if (size <= 0) size = default_size(name);
  Benchmark b;
  if (name == "toffoli") {
    b = toffoli(mutation);
  } else if (name == "tp") {
    b = teleport(mutation);
  } else if (name == "add") {
    need_size(name, size, 1, 8);
    b = adder(size, mutation);
  } else if (name == "qft") {
    need_size(name, size, 2, 12);
    b = qft(size, mutation);
  } else if (name == "qpe") {
    need_size(name, size, 2, 5);
    b = qpe(size, mutation);
  } else {
    need_size(name, size, 2, 24);
    b = gdo(size, mutation);
  }
  b.name = name;
  b.size = default_size(name) ? size : 0;
  b.mutation = mutation;
  return b;
}

}  // namespace qvsmt
