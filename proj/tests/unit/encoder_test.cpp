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
#include <random>

#include "qvsmt/benchmarks.hpp"
#include "qvsmt/encoder.hpp"
#include "random_gen.hpp"

namespace qvsmt {
namespace {

using cd = std::complex<double>;
using testing::kCases;
constexpr double kPi = std::numbers::pi;

std::vector<ComplexTerm> consts(const std::vector<cd>& v) {
  std::vector<ComplexTerm> out;
  for (cd z : v) out.push_back(ComplexTerm{z.real(), z.imag()});
  return out;
}

std::vector<cd> eval(const std::vector<ComplexTerm>& v, const Valuation& val = {}) {
  std::vector<cd> out;
  for (const auto& z : v) out.push_back(evaluate(z, val));
  return out;
}

std::vector<ComplexTerm> vars(const std::string& stem, std::size_t n) {
  std::vector<ComplexTerm> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(ComplexTerm{RealTerm::var(stem + std::to_string(i) + "r"), RealTerm::var(stem + std::to_string(i) + "i")});
  return out;
}

QubitBlock input_block() {
  EncodingResult r = encode(build_program(1, {}, {}, {}), {});
  return r.table.snapshot(0, "").groups.at(0).block;
}

Valuation bloch_point(double theta, double phi) {
  return {{"theta_0_0", theta},
          {"phi_0_0", phi},
          {"alpha_0_0", std::cos(theta / 2)},
          {"beta_re_0_0", std::cos(phi) * std::sin(theta / 2)},
          {"beta_im_0_0", std::sin(phi) * std::sin(theta / 2)}};
}

TEST(QubitConstraints, ExactIsBlochParametrisation) {
  QubitBlock q = input_block();
  Constraint c = qubit_constraints(q, {});
  std::string text = to_smtlib(c);
  EXPECT_EQ(text.rfind("(and (= alpha_0_0 (cos (* 0.5 theta_0_0)))", 0), 0u) << text;
  EXPECT_TRUE(holds(c, bloch_point(1.0, 2.0), 1e-12));
  EXPECT_TRUE(holds(c, bloch_point(0.0, 0.0)));
  EXPECT_FALSE(holds(c, bloch_point(0.0, 1.0)));  // phi pinned at the poles
  Valuation off = bloch_point(1.0, 2.0);
  off["alpha_0_0"] += 0.1;
  EXPECT_FALSE(holds(c, off));
}

TEST(QubitConstraints, BoxHasSixBoundsAndNoTrig) {
  EncodeOptions o;
  o.mode = Mode::Box;
  std::string text = to_smtlib(qubit_constraints(input_block(), o));
  EXPECT_EQ(text.find("cos"), std::string::npos);
  EXPECT_EQ(text.find("theta"), std::string::npos);
  std::size_t n = 0;
  for (std::size_t p = text.find("(<="); p != std::string::npos; p = text.find("(<=", p + 1)) ++n;
  EXPECT_EQ(n, 6u) << text;
}

// Every Exact model is a Box model.
TEST(QubitConstraints, BoxContainsExact) {
  QubitBlock q = input_block();
  EncodeOptions box;
  box.mode = Mode::Box;
  Constraint ce = qubit_constraints(q, {}), cb = qubit_constraints(q, box);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j < 40; ++j) {
      double theta = kPi * i / 20, phi = 2 * kPi * j / 40;
      Valuation v = bloch_point(theta, i == 0 || i == 20 ? 0.0 : phi);
      ASSERT_TRUE(holds(ce, v, 1e-12)) << theta << " " << phi;
      EXPECT_TRUE(holds(cb, v));
    }
  }
}

TEST(Tensor, BasisExample) {
  auto t = eval(tensor_terms(consts({1.0, 0.0}), consts({1.0, 0.0})));
  EXPECT_EQ(t, (std::vector<cd>{1.0, 0.0, 0.0, 0.0}));
  auto u = eval(tensor_terms(consts({0.0, 1.0}), consts({1.0, 0.0})));
  EXPECT_EQ(u, (std::vector<cd>{0.0, 0.0, 1.0, 0.0}));  // first argument is the MSB
}

TEST(Tensor, AssociativeAndNormPreserving) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < kCases; ++i) {
    auto a = consts(testing::random_state(rng, 1)), b = consts(testing::random_state(rng, 2)),
         c = consts(testing::random_state(rng, 1));
    auto l = eval(tensor_terms(tensor_terms(a, b), c));
    auto r = eval(tensor_terms(a, tensor_terms(b, c)));
    EXPECT_LT(testing::max_diff(l, r), 1e-12);
    double n = 0;
    for (cd z : l) n += std::norm(z);
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
}

TEST(ApplyMatrix, CxPermutesSymbolicAmplitudes) {
  auto amps = vars("a", 4);
  auto out = apply_matrix_terms(matrix_for(GateSpec::cx(0, 1)), {0, 1}, {0, 1}, amps);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(to_smtlib(out[2].re), "a3r");
  EXPECT_EQ(to_smtlib(out[3].im), "a2i");
  EXPECT_EQ(to_smtlib(out[0].re), "a0r");
}

// Random two-qubit unitaries embedded in three qubits against a dense oracle.
TEST(ApplyMatrix, MatchesDenseOracle) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < kCases; ++i) {
    auto u = testing::random_unitary(rng, 4);
    GateMatrix m;
    m.dim = 4;
    m.e = consts(u);
    std::vector<int> ops = {testing::pick(rng, 3), 0};
    do {
      ops[1] = testing::pick(rng, 3);
    } while (ops[1] == ops[0]);
    auto psi = testing::random_state(rng, 3);
    auto got = eval(apply_matrix_terms(m, {0, 1, 2}, ops, consts(psi)));
    EXPECT_LT(testing::max_diff(got, testing::apply_full(u, ops, 3, psi)), 1e-12);
  }
}

TEST(ApplyMatrix, RzThenInverseIsIdentity) {
  auto amps = vars("a", 2);
  RealTerm phi = RealTerm::var("phi");
  auto once = apply_matrix_terms(matrix_for(GateSpec::rz(0, phi)), {0}, {0}, amps);
  auto back = apply_matrix_terms(matrix_for(GateSpec::rz(0, -phi)), {0}, {0}, once);
  std::mt19937_64 rng(43);
  for (int i = 0; i < kCases; ++i) {
    Valuation v{{"phi", testing::uniform(rng, -7, 7)}};
    auto psi = testing::random_state(rng, 1);
    v["a0r"] = psi[0].real(), v["a0i"] = psi[0].imag(), v["a1r"] = psi[1].real(), v["a1i"] = psi[1].imag();
    EXPECT_LT(testing::max_diff(eval(back, v), psi), 1e-12);
  }
}

TEST(Project, KeepsOutcomeSlice) {
  auto amps = vars("a", 8);
  auto out = project_terms({0, 1, 2}, amps, {0, 2}, {1, 0});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(to_smtlib(out[0].re), "a4r");  // q0=1 q1=0 q2=0
  EXPECT_EQ(to_smtlib(out[1].re), "a6r");  // q0=1 q1=1 q2=0
}

TEST(Encode, TeleportationShape) {
  Benchmark b = generate("tp");
  EncodingResult r = encode(b.program, {});
  EXPECT_EQ(r.decls.size(), 229u);
  EXPECT_EQ(r.qubit_constraints.size(), 9u);
  EXPECT_EQ(r.initial.size(), 8u);
  EXPECT_EQ(r.probabilities.size(), 4u);
  EXPECT_EQ(r.table.branch_labels(), (std::vector<std::string>{"00", "01", "10", "11"}));
  // outcome pins on the measured qubits
  std::string ops;
  for (const auto& c : r.operations) ops += to_smtlib(c) + "\n";
  EXPECT_NE(ops.find("(and (= alpha_3_0_10 0.0) (= beta_re_3_0_10 1.0) (= beta_im_3_0_10 0.0))"), std::string::npos);
  EXPECT_NE(ops.find("(and (= alpha_3_1_10 1.0) (= beta_re_3_1_10 0.0) (= beta_im_3_1_10 0.0))"), std::string::npos);
}

TEST(Encode, DeclarationsAreUniqueAndCovered) {
  for (const auto& name : benchmark_names()) {
    EncodingResult r = encode(generate(name).program, {});
    std::set<std::string> d(r.decls.begin(), r.decls.end());
    EXPECT_EQ(d.size(), r.decls.size()) << name;
    EXPECT_NO_THROW(emit(r.script())) << name;
  }
}

TEST(Encode, BranchCountIsTwoToTheMeasured) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 100; ++i) {
    int n = 2 + testing::pick(rng, 2);
    std::vector<StateOp> ops;
    std::set<int> measured;
    for (int k = 0; k < 4; ++k) {
      int q = testing::pick(rng, n);
      if (testing::pick(rng, 3) == 0 && !measured.count(q)) {
        measured.insert(q);
        ops.push_back(StateOp::measure({q}));
      } else {
        ops.push_back(StateOp::apply(testing::pick(rng, 2) ? GateSpec::h(q) : GateSpec::cx(q, (q + 1) % n)));
      }
    }
    ProgramModel p = build_program(n, ops, {}, {});
    EncodingResult r = encode(p, {});
    EXPECT_EQ(r.probabilities.size(), std::size_t{1} << p.measured_count());
    EXPECT_EQ(r.table.branch_labels().size(), std::size_t{1} << p.measured_count());
  }
}

TEST(Encode, BoxModeDropsAngles) {
  EncodeOptions o;
  o.mode = Mode::Box;
  EncodingResult r = encode(generate("tp").program, o);
  for (const auto& d : r.decls) {
    EXPECT_EQ(d.rfind("theta", 0), std::string::npos) << d;
    EXPECT_EQ(d.rfind("phi", 0), std::string::npos) << d;
  }
}

TEST(Encode, Deterministic) {
  for (const auto& name : benchmark_names()) {
    Benchmark b = generate(name);
    EXPECT_EQ(emit(encode(b.program, {}).script()), emit(encode(b.program, {}).script())) << name;
  }
}

}  // namespace
}  // namespace qvsmt
