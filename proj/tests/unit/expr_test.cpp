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

#include <cmath>
#include <random>

#include "qvsmt/expr.hpp"
#include "qvsmt/smtlib.hpp"
#include "random_gen.hpp"

namespace qvsmt {
namespace {

using testing::kCases;

RealTerm v(const char* n) { return RealTerm::var(n); }

TEST(ComplexMul, IdentityIsNeutral) {
  ComplexTerm z{v("x"), v("y")};
  ComplexTerm r = ComplexTerm{1.0, 0.0} * z;
  EXPECT_EQ(to_smtlib(r.re), "x");
  EXPECT_EQ(to_smtlib(r.im), "y");
}

TEST(ComplexMul, ISquaredFoldsToMinusOne) {
  ComplexTerm r = ComplexTerm{0.0, 1.0} * ComplexTerm{0.0, 1.0};
  ASSERT_TRUE(fold_constants(r.re).is_const(-1.0));
  ASSERT_TRUE(fold_constants(r.im).is_const(0.0));
}

TEST(ComplexMul, ExpandsProductOfTwoBetas) {
  ComplexTerm a{v("beta_re_0_1"), v("beta_im_0_1")};
  ComplexTerm b{v("beta_re_0_2"), v("beta_im_0_2")};
  ComplexTerm r = a * b;
  EXPECT_EQ(to_smtlib(r.re), "(- (* beta_re_0_1 beta_re_0_2) (* beta_im_0_1 beta_im_0_2))");
  EXPECT_EQ(to_smtlib(r.im), "(+ (* beta_re_0_1 beta_im_0_2) (* beta_im_0_1 beta_re_0_2))");
}

TEST(ComplexMul, AssociativeAndCommutativeAtRandomPoints) {
  std::mt19937_64 rng(11);
  ComplexTerm a{v("x0"), v("x1")}, b{v("x2"), v("x3")}, c{v("x1"), v("x0") * v("x2")};
  for (int i = 0; i < kCases; ++i) {
    Valuation val = testing::random_valuation(rng);
    auto l = evaluate((a * b) * c, val), r = evaluate(a * (b * c), val);
    EXPECT_NEAR(std::abs(l - r), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(evaluate(a * b, val) - evaluate(b * a, val)), 0.0, 1e-12);
  }
}

TEST(FoldConstants, Examples) {
  EXPECT_TRUE(fold_constants(RealTerm::make(TermOp::Mul, {0.0, v("a")})).is_const(0.0));
  EXPECT_EQ(to_smtlib(fold_constants(RealTerm::make(TermOp::Add, {v("a"), 0.0}))), "a");
  EXPECT_TRUE(fold_constants(RealTerm::make(TermOp::Mul, {2.0, 3.0})).is_const(6.0));
}

TEST(FoldConstants, PreservesValue) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < kCases; ++i) {
    RealTerm t = testing::random_term(rng, 5);
    RealTerm f = fold_constants(t);
    for (int k = 0; k < 5; ++k) {
      Valuation val = testing::random_valuation(rng);
      double a = evaluate(t, val), b = evaluate(f, val);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a))) << to_smtlib(t);
    }
  }
}

TEST(ToSmtlib, DeclareAndAssert) {
  SmtScript s;
  s.decls = {"a"};
  s.sections.push_back({"x", {Constraint::eq(v("a"), 1.0)}});
  std::string out = emit(s);
  EXPECT_NE(out.find("(declare-fun a () Real)\n"), std::string::npos);
  EXPECT_NE(out.find("(assert (= a 1.0))"), std::string::npos);
}

TEST(ToSmtlib, HalfAngleCosine) {
  Constraint c = Constraint::eq(v("alpha"), cos_t(RealTerm(0.5) * v("theta")));
  std::string text = to_smtlib(c);
  EXPECT_EQ(text, "(= alpha (cos (* 0.5 theta)))");
  auto e = parse_sexprs(text);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(to_string(e[0]), text);
}

TEST(ToSmtlib, UndeclaredVariableIsRejected) {
  SmtScript s;
  s.decls = {"a"};
  s.sections.push_back({"x", {Constraint::eq(v("a"), v("b"))}});
  try {
    emit(s);
    FAIL() << "no exception";
  } catch (const UndeclaredVariable& e) {
    EXPECT_EQ(e.name(), "b");
  }
}

TEST(ToSmtlib, Deterministic) {
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 50; ++i)
    EXPECT_EQ(to_smtlib(testing::random_constraint(a, 4)), to_smtlib(testing::random_constraint(b, 4)));
}

TEST(ToSmtlib, SeventeenDigitConstantsRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < kCases; ++i) {
    double x = testing::uniform(rng, -10.0, 10.0);
    double y = 0.0;
    std::string s = format_decimal(std::abs(x));
    ASSERT_TRUE(parse_number(s, y));
    EXPECT_EQ(y, std::abs(x));
  }
}

// Round trip through the parser, random trees to depth 8. Chains like
// (+ c1 c2 pi) come back left-nested with c1+c2 folded, so the first pass
// may differ in constants; after that the text is a fixed point, and the
// values agree everywhere.
TEST(ToSmtlib, RoundTripThroughParser) {
  std::mt19937_64 rng(13);
  SmtOptions o;
  o.pi_symbol = true;
  auto reparse = [&](const Constraint& c) {
    SmtScript s;
    s.decls = testing::var_names();
    s.sections.push_back({"r", {c}});
    ParsedScript p = parse_smtlib(emit(s, o));
    EXPECT_EQ(p.assertions.size(), 1u);
    return p.assertions.at(0);
  };
  for (int i = 0; i < kCases; ++i) {
    Constraint c = testing::random_constraint(rng, 8);
    Constraint once = reparse(c);
    Constraint twice = reparse(once);
    EXPECT_EQ(to_smtlib(twice, o), to_smtlib(once, o));
    for (int k = 0; k < 3; ++k) {
      Valuation val = testing::random_valuation(rng);
      EXPECT_EQ(holds(once, val), holds(c, val)) << to_smtlib(c, o);
    }
  }
}

TEST(Constraint, FlatteningKeepsTruth) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < kCases; ++i) {
    Constraint a = testing::random_constraint(rng, 3), b = testing::random_constraint(rng, 3),
               c = testing::random_constraint(rng, 3);
    Constraint nested = Constraint::conj({a, Constraint::conj({b, c})});
    Constraint flat = Constraint::conj({a, b, c});
    Constraint dn = Constraint::disj({Constraint::disj({a, b}), c});
    Constraint df = Constraint::disj({a, b, c});
    Valuation val = testing::random_valuation(rng);
    EXPECT_EQ(holds(nested, val), holds(flat, val));
    EXPECT_EQ(holds(dn, val), holds(df, val));
    EXPECT_EQ(holds(to_nnf(nested), val), holds(nested, val));
  }
}

TEST(Evaluate, UnboundVariableThrows) { EXPECT_THROW(evaluate(v("nope"), Valuation{}), EvalError); }

TEST(Evaluate, DivisionByConstantZeroIsRejected) { EXPECT_THROW(v("a") / RealTerm(0.0), EvalError); }

}  // namespace
}  // namespace qvsmt
