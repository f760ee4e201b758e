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

#include <gtest/gtest.h>

#include <random>

#include "qvsmt/benchmarks.hpp"
#include "qvsmt/smtlib.hpp"
#include "qvsmt/solver.hpp"
#include "qvsmt/spec.hpp"
#include "random_gen.hpp"

namespace qvsmt {
namespace {

using testing::kCases;

// Alpha of qubit k reads as variable xk; nothing else is available.
class VarView : public StateView {
 public:
  int n_qubits() const override { return 4; }
  int state_count() const override { return 1; }
  std::vector<std::string> branch_labels() const override { return {""}; }
  std::vector<std::pair<ComplexTerm, ComplexTerm>> qubit_pairs(int, int, const std::string&) const override {
    throw UnresolvedSymRef("no pairs");
  }
  ComplexTerm amplitude(int, std::size_t, const std::string&) const override { throw UnresolvedSymRef("no amps"); }
  RealTerm component(int, int qubit, const std::string&, Role) const override {
    return RealTerm::var("x" + std::to_string(qubit));
  }
  RealTerm param(const std::string&) const override { throw UnresolvedSymRef("no params"); }
};

RealTerm spec_term(std::mt19937_64& rng) {
  return substitute(testing::random_term(rng, 3), [](const std::string& v) -> std::optional<RealTerm> {
    return ref(Role::Alpha, 0, v[1] - '0', "b");
  });
}

SpecFormula random_spec(std::mt19937_64& rng, int depth) {
  if (depth == 0 || testing::pick(rng, 4) == 0) {
    const Rel rels[] = {Rel::Eq, Rel::Le, Rel::Lt, Rel::Ge, Rel::Gt};
    return SpecFormula::cmp(rels[testing::pick(rng, 5)], spec_term(rng), spec_term(rng));
  }
  auto sub = [&] { return random_spec(rng, depth - 1); };
  switch (testing::pick(rng, 5)) {
    case 0: return SpecFormula::all({sub(), sub(), sub()});
    case 1: return SpecFormula::any({sub(), sub()});
    case 2: return SpecFormula::negation(sub());
    case 3: return SpecFormula::implies(sub(), sub());
    default: return SpecFormula::ite(sub(), sub(), sub());
  }
}

bool at(const SpecFormula& f, const Valuation& v) { return holds(translate(f, VarView{}), v); }

TEST(Negate, ExactWhenEpsIsZero) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < kCases; ++i) {
    SpecFormula f = random_spec(rng, 4);
    SpecFormula n = negate(f, 0.0), nn = negate(n, 0.0);
    for (int k = 0; k < 5; ++k) {
      Valuation v = testing::random_valuation(rng);
      bool h = at(f, v);
      EXPECT_NE(at(n, v), h) << to_text(f);
      EXPECT_EQ(at(nn, v), h) << to_text(f);
    }
  }
}

// With a margin the negation is stronger than "not", and the double
// negation weaker than the formula.
TEST(Negate, MarginSoundness) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < kCases; ++i) {
    SpecFormula f = random_spec(rng, 4);
    SpecFormula n = negate(f, 1e-3), nn = negate(n, 1e-3);
    for (int k = 0; k < 5; ++k) {
      Valuation v = testing::random_valuation(rng);
      bool h = at(f, v);
      if (at(n, v)) EXPECT_FALSE(h) << to_text(f);
      if (h) EXPECT_TRUE(at(nn, v)) << to_text(f);
    }
  }
}

TEST(Negate, EqualityBecomesTwoSidedGap) {
  SpecFormula f = SpecFormula::cmp(Rel::Eq, ref(Role::Alpha, 0, 0, "b"), RealTerm(0.5));
  Constraint c = translate(negate(f, 1e-3), VarView{});
  EXPECT_FALSE(holds(c, {{"x0", 0.5005}}));
  EXPECT_TRUE(holds(c, {{"x0", 0.502}}));
  EXPECT_TRUE(holds(c, {{"x0", 0.498}}));
}

TEST(ExpandBranches, OneConjunctPerLabel) {
  Benchmark b = generate("tp");
  SpecFormula e = expand_branches(b.spec.formula, branch_labels(b.program));
  std::string t = to_text(e);
  for (const char* l : {"00", "01", "10", "11"}) EXPECT_NE(t.find(l), std::string::npos) << t;
  EXPECT_EQ(t.find('*'), std::string::npos) << t;
}

TEST(Translate, WildcardMustBeExpanded) {
  SpecFormula f = SpecFormula::cmp(Rel::Eq, ref(Role::Alpha, 0, 0), RealTerm(0.5));
  EXPECT_THROW(translate(f, VarView{}), UnresolvedSymRef);
}

TEST(Structural, TeleportationKeepsAliceAndBobApart) {
  Benchmark b = generate("tp");
  EXPECT_FALSE(check_structural(b.spec.rules, b.program));
  EXPECT_FALSE(check_structural({}, b.program));

  std::vector<StateOp> ops = b.program.ops;
  ops.insert(ops.begin() + 1, StateOp::apply(GateSpec::cx(0, 2)));
  ProgramModel bad = build_program(3, ops, b.program.params, b.program.inits);
  auto v = check_structural(b.spec.rules, bad);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->op_index, 1);

  // after the measurement the same gate is allowed
  ops = b.program.ops;
  ops.push_back(StateOp::apply(GateSpec::cx(0, 2)));
  EXPECT_FALSE(check_structural(b.spec.rules, build_program(3, ops, b.program.params, b.program.inits)));
}

TEST(ParseQspec, Forms) {
  Spec s = parse_qspec(
      "; comment\n"
      "(qeq (q 5 2) (q 0 0))\n"
      "(=> (> (theta 0 0) 0.1) (< (+ (alpha 3 0 10) (beta_re 3 1 10)) 2))\n"
      "(forbid-joint (0 1) (2) measure)\n");
  EXPECT_EQ(s.rules.size(), 1u);
  EXPECT_EQ(s.rules[0].a, (std::vector<int>{0, 1}));
  EXPECT_EQ(s.rules[0].before, -1);
  EXPECT_EQ(s.formula.kind(), SKind::And);
  EXPECT_EQ(s.formula.node().kids.size(), 2u);
  EXPECT_EQ(s.formula.node().kids[0].kind(), SKind::QubitEq);

  Spec k = parse_qspec("(qeq (q 1 0 00) (ket 0 0 1 0))");
  EXPECT_EQ(k.formula.node().qb.kind, QubitTarget::Kind::Ket);
  EXPECT_EQ(k.formula.node().qa.branch, "00");
}

TEST(ParseQspec, Errors) {
  EXPECT_THROW(parse_qspec("(qeq (q 5 2))"), ParseError);
  EXPECT_THROW(parse_qspec("(< (alpha 0) 1)"), ParseError);
  EXPECT_THROW(parse_qspec("(< (frob 0 0) 1)"), ParseError);
  EXPECT_THROW(parse_qspec("(forbid-joint (0) (1) soon)"), ParseError);
  EXPECT_THROW(parse_qspec("(qeq (q 1 0) (flip (ket 1 0 0 0)))"), ParseError);
}

SolverConfig cfg() {
  SolverConfig c;
  c.solver_path = QVSMT_QSOLVE;
  c.timeout_s = 60;
  return c;
}

TEST(Query, TautologyIsUnsat) {
  Benchmark b = generate("tp");
  Spec s{SpecFormula::qubit_eq(QubitTarget::q(0, 0), QubitTarget::q(0, 0)), {}};
  VerifyReport r = verify(b.program, s, cfg());
  EXPECT_EQ(r.outcome, Outcome::Verified) << r.message;
}

TEST(Query, FlippedTargetIsRefuted) {
  Benchmark b = generate("tp");
  Spec s{SpecFormula::qubit_eq(QubitTarget::q(5, 2), QubitTarget::flip(0, 0)), {}};
  VerifyReport r = verify(b.program, s, cfg());
  EXPECT_EQ(r.outcome, Outcome::Refuted) << r.message;
  ASSERT_TRUE(r.counterexample);
  EXPECT_GT(replay(b.program, s.formula, *r.counterexample), 1e-3);
}

TEST(Query, AssembledScriptNegatesSpec) {
  Benchmark b = generate("tp");
  Query q = assemble_query(b.program, b.spec.formula, {}, 1e-3);
  std::string text = emit(q.script());
  EXPECT_NE(text.find("; section: spec"), std::string::npos);
  EXPECT_NE(text.find("(< "), std::string::npos);
  EXPECT_NE(text.find("0.001"), std::string::npos);
}

}  // namespace
}  // namespace qvsmt
