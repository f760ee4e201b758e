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
#include "qvsmt/qpm.hpp"
#include "qvsmt/smtlib.hpp"
#include "random_gen.hpp"

namespace qvsmt {
namespace {

using Code = ModelError::Code;

ProgramModel teleport() {
  return build_program(3,
                       {StateOp::apply(GateSpec::cx(0, 1)), StateOp::apply(GateSpec::h(0)), StateOp::measure({0, 1}),
                        StateOp::apply(GateSpec::cx(1, 2)), StateOp::apply(GateSpec::cz(0, 2))},
                       {}, {InitSpec::full(0), InitSpec::bell(1, 2)});
}

Code code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ModelError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ModelError";
  return Code::BadMeasure;
}

TEST(BuildProgram, Teleportation) {
  ProgramModel p = teleport();
  EXPECT_EQ(p.state_count(), 6);
  EXPECT_EQ(p.measured_count(), 2);
  EXPECT_EQ(branch_labels(p), (std::vector<std::string>{"00", "01", "10", "11"}));
}

TEST(BuildProgram, EmptyOneQubit) {
  ProgramModel p = build_program(1, {}, {}, {});
  EXPECT_EQ(p.state_count(), 1);
  EXPECT_EQ(branch_labels(p), std::vector<std::string>{""});
}

TEST(BuildProgram, GdoThreeFlattensPerQubitOps) {
  Benchmark b = generate("gdo", 3);
  EXPECT_EQ(b.program.state_count(), 14);  // 12 single-qubit ops + one controlled Z, plus s0
  EXPECT_EQ(branch_labels(b.program).size(), 1u);
}

TEST(BuildProgram, Errors) {
  EXPECT_EQ(code_of([] { build_program(2, {StateOp::apply(GateSpec::h(2))}, {}, {}); }), Code::IndexOutOfRange);
  EXPECT_EQ(code_of([] { build_program(2, {StateOp::apply(GateSpec::cx(1, 1))}, {}, {}); }), Code::DuplicateTarget);
  EXPECT_EQ(code_of([] {
              build_program(3, {StateOp::apply(GateSpec::controlled(GateSpec::z(0), {0, 1}))}, {}, {});
            }),
            Code::DuplicateTarget);
  EXPECT_EQ(code_of([] { build_program(1, {StateOp::apply(GateSpec::rz(0, param("t")))}, {}, {}); }),
            Code::UnboundParameter);
  EXPECT_EQ(code_of([] { build_program(2, {StateOp::measure({})}, {}, {}); }), Code::BadMeasure);
  EXPECT_EQ(code_of([] { build_program(2, {StateOp::measure({0, 0})}, {}, {}); }), Code::DuplicateTarget);
  EXPECT_EQ(code_of([] { build_program(3, {}, {}, {InitSpec::joint({0, 2}, {1, 0, 0, 0})}); }), Code::BadInitial);
  EXPECT_EQ(code_of([] { build_program(2, {}, {}, {InitSpec::bell(0, 1), InitSpec::full(1)}); }), Code::BadInitial);
  EXPECT_EQ(code_of([] { build_program(1, {}, {}, {InitSpec::concrete(0, 1.0, 1.0)}); }), Code::BadInitial);
  EXPECT_EQ(code_of([] {
              build_program(1, {StateOp::apply(GateSpec::custom({0}, {{1, 0}, {1, 0}, {0, 0}, {1, 0}}))}, {}, {});
            }),
            Code::BadMatrix);
}

TEST(BuildProgram, AcceptsEveryBenchmark) {
  for (const auto& name : benchmark_names()) {
    EXPECT_NO_THROW(generate(name)) << name;
    for (const auto& m : mutations_for(name)) EXPECT_NO_THROW(generate(name, 0, m)) << name << "/" << m;
  }
}

TEST(BranchLabels, CountIsTwoToTheMeasured) {
  EXPECT_EQ(branch_labels(3), (std::vector<std::string>{"000", "001", "010", "011", "100", "101", "110", "111"}));
  std::mt19937_64 rng(21);
  for (int i = 0; i < testing::kCases; ++i) {
    int n = 1 + testing::pick(rng, 5);
    std::vector<StateOp> ops;
    int measured = 0;
    for (int k = 0; k < 6; ++k) {
      if (testing::pick(rng, 3) == 0) {
        std::vector<int> qs;
        for (int q = 0; q < n; ++q)
          if (testing::pick(rng, 2)) qs.push_back(q);
        if (qs.empty()) qs.push_back(testing::pick(rng, n));
        measured += static_cast<int>(qs.size());
        ops.push_back(StateOp::measure(qs));
      } else {
        ops.push_back(StateOp::apply(GateSpec::h(testing::pick(rng, n))));
      }
    }
    ProgramModel p = build_program(n, ops, {}, {});
    auto labels = branch_labels(p);
    ASSERT_EQ(labels.size(), std::size_t{1} << measured);
    EXPECT_TRUE(std::is_sorted(labels.begin(), labels.end()));
  }
}

TEST(TouchedQubits, Examples) {
  EXPECT_EQ(touched_qubits(StateOp::apply(GateSpec::cx(0, 1))), (std::set<int>{0, 1}));
  EXPECT_EQ(touched_qubits(StateOp::apply(GateSpec::controlled(GateSpec::z(0), {1, 2}))), (std::set<int>{0, 1, 2}));
  EXPECT_EQ(touched_qubits(StateOp::measure({0, 1})), (std::set<int>{0, 1}));
}

TEST(Dsl, ParsesTeleportation) {
  ProgramModel p = parse_qpm(
      "qubits 3\n"
      "init 0 full\n"
      "init 1 2 bell   # shared pair\n"
      "cx 0 1\nh 0\nmeasure 0 1\ncx 1 2\ncz 0 2\n");
  ProgramModel q = teleport();
  EXPECT_EQ(to_qpm(p), to_qpm(q));
}

TEST(Dsl, ControlledAndParams) {
  ProgramModel p = parse_qpm(
      "qubits 3\nparam theta 0 1 open\n"
      "rz 2 (* 2 pi theta) ctrl 0\n"
      "rk 3 1 ctrl 0\nccz 0 1 2\n");
  ASSERT_EQ(p.params.size(), 1u);
  EXPECT_TRUE(p.params[0].hi_open);
  EXPECT_EQ(p.ops[0].gate.control_qubits(), std::vector<int>{0});
  EXPECT_EQ(p.ops[2].gate.control_qubits(), (std::vector<int>{0, 1}));
  EXPECT_EQ(parse_qpm(to_qpm(p)).ops.size(), 3u);
  std::string once = to_qpm(parse_qpm(to_qpm(p)));
  EXPECT_EQ(to_qpm(parse_qpm(once)), once);
}

// Angle products like (* 8.0 pi theta) fold to one constant on the way
// back in, so the text settles after one pass.
TEST(Dsl, RoundTripsEveryBenchmark) {
  for (const auto& name : benchmark_names()) {
    Benchmark b = generate(name);
    std::string once = to_qpm(parse_qpm(to_qpm(b.program)));
    EXPECT_EQ(to_qpm(parse_qpm(once)), once) << name;
    EXPECT_EQ(parse_qpm(once).state_count(), b.program.state_count()) << name;
  }
}

TEST(Dsl, Errors) {
  EXPECT_THROW(parse_qpm("h 0\n"), ParseError);
  EXPECT_THROW(parse_qpm("qubits 1\nfrobnicate 0\n"), ParseError);
  EXPECT_THROW(parse_qpm("qubits 1\ncx 0\n"), ParseError);
  EXPECT_THROW(parse_qpm("qubits 1\nh 3\n"), ModelError);
  try {
    parse_qpm("qubits 2\nh 0\nzap 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(StripPhase, AlphaBecomesRealNonNegative) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < testing::kCases; ++i) {
    auto [a, b] = testing::random_qubit(rng);
    auto [a2, b2] = strip_phase(a, b);
    EXPECT_EQ(a2.imag(), 0.0);  // exactly, or pinned encodings disagree with the simulator
    EXPECT_GE(a2.real(), 0.0);
    EXPECT_NEAR(std::abs(a2 * b - a * b2), 0.0, 1e-12);  // same ray
    EXPECT_NEAR(std::norm(a2) + std::norm(b2), 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace qvsmt
