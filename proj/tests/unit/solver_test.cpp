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

#include <numbers>

#include "qvsmt/benchmarks.hpp"
#include "qvsmt/dsolve.hpp"
#include "qvsmt/smtlib.hpp"
#include "qvsmt/solver.hpp"

namespace qvsmt {
namespace {

RealTerm x() { return RealTerm::var("x"); }

SolverConfig cfg() {
  SolverConfig c;
  c.solver_path = QVSMT_QSOLVE;
  c.timeout_s = 60;
  return c;
}

TEST(Run, BundledSolverIsAvailable) { EXPECT_TRUE(solver_available(QVSMT_QSOLVE)); }

TEST(Run, ContradictionIsUnsat) {
  Verdict v = run(Constraint::conj({Constraint::eq(x(), 1.0), Constraint::eq(x(), 2.0)}), cfg());
  EXPECT_EQ(v.kind, VerdictKind::Unsat) << v.text;
}

TEST(Run, SineHasDeltaModel) {
  Constraint c = Constraint::conj({Constraint::atom(Rel::Le, 0.0, x()), Constraint::atom(Rel::Le, x(), 3.0),
                                   Constraint::eq(sin_t(x()), 0.5)});
  Verdict v = run(c, cfg());
  ASSERT_EQ(v.kind, VerdictKind::DeltaSat) << v.text;
  auto iv = v.value("x");
  ASSERT_TRUE(iv);
  double m = iv->mid();
  const double r1 = std::numbers::pi / 6, r2 = 5 * std::numbers::pi / 6;
  EXPECT_TRUE(std::abs(m - r1) < 1e-3 || std::abs(m - r2) < 1e-3) << m;
  EXPECT_NEAR(std::sin(m), 0.5, 1e-3);
}

TEST(Run, RejectsNonPositiveDelta) {
  SolverConfig c = cfg();
  c.delta = 0;
  EXPECT_THROW(run(Constraint::eq(x(), 1.0), c), std::invalid_argument);
}

TEST(Run, MissingSolverIsAnError) {
  SolverConfig c = cfg();
  c.solver_path = "/nonexistent/solver";
  EXPECT_FALSE(solver_available(c.solver_path));
  Verdict v;
  try {
    v = run(Constraint::eq(x(), 1.0), c);
  } catch (const SolverError&) {
    v.kind = VerdictKind::SolverError;
  }
  EXPECT_EQ(v.kind, VerdictKind::SolverError);
}

TEST(ParseOutput, DrealProfile) {
  Verdict v = parse_solver_output("delta-sat with delta = 0.0001\nx : [0.5, 0.50001]\ny : [-1, -1]\n",
                                  SolverProfile::DReal);
  ASSERT_EQ(v.kind, VerdictKind::DeltaSat);
  ASSERT_EQ(v.model.size(), 2u);
  EXPECT_DOUBLE_EQ(v.value("x")->lo, 0.5);
  EXPECT_DOUBLE_EQ(v.value("y")->hi, -1.0);
  EXPECT_FALSE(v.value("z"));
  EXPECT_EQ(parse_solver_output("unsat\n", SolverProfile::DReal).kind, VerdictKind::Unsat);
  EXPECT_EQ(parse_solver_output("\nunknown\n", SolverProfile::DReal).kind, VerdictKind::Unknown);
  EXPECT_EQ(parse_solver_output("", SolverProfile::DReal).kind, VerdictKind::SolverError);
  EXPECT_EQ(parse_solver_output("delta-sat with delta = 0.1\ngarbage\n", SolverProfile::DReal).kind,
            VerdictKind::SolverError);
}

TEST(ParseOutput, SmtLibProfile) {
  Verdict v = parse_solver_output("sat\n(model\n  (define-fun x () Real 0.25)\n  (define-fun y () Real (- 1.5))\n)\n",
                                  SolverProfile::SmtLib);
  ASSERT_EQ(v.kind, VerdictKind::DeltaSat) << v.text;
  EXPECT_DOUBLE_EQ(v.value("x")->mid(), 0.25);
  EXPECT_DOUBLE_EQ(v.value("y")->mid(), -1.5);
  EXPECT_EQ(parse_solver_output("unsat\n", SolverProfile::SmtLib).kind, VerdictKind::Unsat);
  // dReal wording is not an SMT-LIB answer
  EXPECT_EQ(parse_solver_output("delta-sat with delta = 0.1\n", SolverProfile::SmtLib).kind,
            VerdictKind::SolverError);
}

TEST(Verify, TeleportationHoldsAndMutantsFail) {
  Benchmark b = generate("tp");
  VerifyReport r = verify(b.program, b.spec, cfg());
  EXPECT_EQ(r.outcome, Outcome::Verified) << r.message;
  EXPECT_EQ(exit_code(r.outcome), 0);
  for (const auto& m : mutations_for("tp")) {
    Benchmark bm = generate("tp", 0, m);
    VerifyReport rm = verify(bm.program, bm.spec, cfg());
    EXPECT_EQ(rm.outcome, Outcome::Refuted) << m << " " << rm.message;
    ASSERT_TRUE(rm.counterexample) << m;
    EXPECT_FALSE(rm.counterexample->outside_hilbert);
    EXPECT_GT(replay(bm.program, bm.spec.formula, *rm.counterexample), 1e-3) << m;
  }
}

// A Box witness outside the unit sphere is spurious; the Exact re-run decides.
TEST(Verify, BoxWitnessTriggersExactRerun) {
  Benchmark b = generate("gdo", 3, "sign-flip");
  SolverConfig c = cfg();
  c.mode = Mode::Box;
  VerifyReport r = verify(b.program, b.spec, c);
  ASSERT_EQ(r.attempts.size(), 2u);
  EXPECT_EQ(r.attempts[0].mode, Mode::Box);
  ASSERT_TRUE(r.attempts[0].counterexample);
  EXPECT_TRUE(r.attempts[0].counterexample->outside_hilbert);
  EXPECT_EQ(r.attempts[1].mode, Mode::Exact);
  EXPECT_EQ(r.mode, Mode::Exact);
  EXPECT_EQ(r.outcome, Outcome::Refuted);
}

TEST(Verify, StructuralViolationSkipsSolver) {
  Benchmark b = generate("tp");
  std::vector<StateOp> ops = b.program.ops;
  ops.insert(ops.begin(), StateOp::apply(GateSpec::cx(0, 2)));
  ProgramModel p = build_program(3, ops, b.program.params, b.program.inits);
  VerifyReport r = verify(p, b.spec, cfg());
  EXPECT_EQ(r.outcome, Outcome::StructuralViolation);
  EXPECT_TRUE(r.attempts.empty());
  EXPECT_EQ(exit_code(r.outcome), 1);
}

TEST(Report, JsonSchema) {
  Benchmark b = generate("tp", 0, "drop-cz");
  VerifyReport r = verify(b.program, b.spec, cfg());
  nlohmann::json j = to_json(r);
  for (const char* k : {"verdict", "delta", "mode", "wall_time_ms", "attempts", "counterexample"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["verdict"], outcome_name(Outcome::Refuted));
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_DOUBLE_EQ(j["delta"].get<double>(), 1e-4);
  ASSERT_FALSE(j["counterexample"]["inputs"].empty());
  EXPECT_EQ(j["counterexample"]["inputs"][0]["alpha"].size(), 2u);
}

TEST(Script, EmissionIsDeterministic) {
  for (const auto& name : benchmark_names()) {
    Benchmark b = generate(name);
    std::string a = emit(assemble_query(b.program, b.spec.formula, {}, 1e-3).script());
    std::string c = emit(assemble_query(b.program, b.spec.formula, {}, 1e-3).script());
    EXPECT_EQ(a, c) << name;
  }
}

TEST(Dsolve, DirectApi) {
  ParsedScript s = parse_smtlib(
      "(declare-fun x () Real)(declare-fun y () Real)"
      "(assert (<= -2 x 2))(assert (<= -2 y 2))"
      "(assert (= (+ (* x x) (* y y)) 1))(assert (= x y))");
  dsolve::Options o;
  o.delta = 1e-6;
  dsolve::Result r = dsolve::solve(s, o);
  ASSERT_EQ(r.status, dsolve::Status::DeltaSat);
  ASSERT_EQ(r.model.size(), 2u);
  double xm = r.model[0].second.mid();
  EXPECT_NEAR(std::abs(xm), std::numbers::sqrt2 / 2, 1e-4);

  ParsedScript u = parse_smtlib(
      "(declare-fun x () Real)(assert (<= -2 x 2))(assert (< (* x x) -0.5))");
  EXPECT_EQ(dsolve::solve(u, o).status, dsolve::Status::Unsat);
  EXPECT_EQ(dsolve::format_result(dsolve::solve(u, o), 1e-6, true), "unsat\n");
}

}  // namespace
}  // namespace qvsmt
