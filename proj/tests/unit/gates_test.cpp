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

#include "qvsmt/gates.hpp"
#include "random_gen.hpp"

namespace qvsmt {
namespace {

using cd = std::complex<double>;
using testing::kCases;

std::vector<cd> tensor(const std::vector<CQubit>& qs) {
  std::vector<cd> out{1.0};
  for (const auto& q : qs) {
    std::vector<cd> next;
    for (cd a : out) {
      next.push_back(a * q[0]);
      next.push_back(a * q[1]);
    }
    out = std::move(next);
  }
  return out;
}

CQubit rand_q(std::mt19937_64& rng) {
  auto [a, b] = testing::random_qubit(rng);
  return {a, b};
}

// Random gate from the catalog on n qubits, with its controls drawn too.
GateSpec random_gate(std::mt19937_64& rng, int n, int max_controls) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  double angle = testing::uniform(rng, -7.0, 7.0);
  GateSpec g = GateSpec::id(perm[0]);
  switch (testing::pick(rng, 8)) {
    case 0: g = GateSpec::x(perm[0]); break;
    case 1: g = GateSpec::z(perm[0]); break;
    case 2: g = GateSpec::h(perm[0]); break;
    case 3: g = GateSpec::rx(perm[0], angle); break;
    case 4: g = GateSpec::rz(perm[0], angle); break;
    case 5: g = GateSpec::rk(perm[0], RealTerm(1.0 + testing::pick(rng, 5))); break;
    case 6: g = GateSpec::swap(perm[0], perm[1]); break;
    default: break;
  }
  int used = g.kind == GateKind::SWAP ? 2 : 1;
  int nc = testing::pick(rng, std::min(max_controls, n - used) + 1);
  if (nc == 0) return g;
  return GateSpec::controlled(g, std::vector<int>(perm.begin() + used, perm.begin() + used + nc));
}

// The direct mapping on product inputs agrees with the gate matrix applied
// to the full tensor product. Controls are basis states, as required.
TEST(Mapping, AgreesWithMatrixOnProductStates) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < kCases; ++i) {
    const int n = 4;
    GateSpec g = random_gate(rng, n, 2);
    auto m = mapping_for(g);
    ASSERT_TRUE(m.has_value()) << g.name();
    std::vector<CQubit> all(n);
    for (auto& q : all) q = rand_q(rng);
    for (int c : g.control_qubits()) all[c] = testing::pick(rng, 2) ? CQubit{0.0, 1.0} : CQubit{1.0, 0.0};
    std::vector<CQubit> in;
    for (int q : g.qubits()) in.push_back(all[q]);
    auto out = apply_numeric(*m, in);
    std::vector<CQubit> after = all;
    for (std::size_t k = 0; k < out.size(); ++k) after[g.qubits()[k]] = out[k];
    auto want = testing::apply_full(numeric(matrix_for(g)), g.qubits(), n, tensor(all));
    EXPECT_LT(testing::max_diff(tensor(after), want), 1e-9) << g.name();
  }
}

TEST(Mapping, RejectsSuperposedControl) {
  auto m = mapping_for(GateSpec::cx(0, 1));
  ASSERT_TRUE(m);
  const double r = std::numbers::sqrt2 / 2;
  EXPECT_THROW(apply_numeric(*m, {CQubit{r, r}, CQubit{1.0, 0.0}}), std::invalid_argument);
}

TEST(Mapping, Examples) {
  auto x = *mapping_for(GateSpec::x(0));
  auto out = apply_numeric(x, {CQubit{cd{0.6, 0.0}, cd{0.0, 0.8}}});
  EXPECT_NEAR(std::abs(out[0][0] - cd{0.0, 0.8}), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[0][1] - cd{0.6, 0.0}), 0.0, 1e-15);

  auto sw = *mapping_for(GateSpec::swap(0, 1));
  out = apply_numeric(sw, {CQubit{1.0, 0.0}, CQubit{0.0, 1.0}});
  EXPECT_EQ(out[0], (CQubit{0.0, 1.0}));
  EXPECT_EQ(out[1], (CQubit{1.0, 0.0}));

  auto h = *mapping_for(GateSpec::h(0));
  out = apply_numeric(h, {CQubit{1.0, 0.0}});
  EXPECT_NEAR(out[0][0].real(), std::numbers::sqrt2 / 2, 1e-15);
  EXPECT_NEAR(out[0][1].real(), std::numbers::sqrt2 / 2, 1e-15);
}

TEST(Matrix, CatalogIsUnitary) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < kCases; ++i) {
    GateSpec g = random_gate(rng, 5, 3);
    auto u = numeric(matrix_for(g));
    EXPECT_TRUE(is_unitary(u, matrix_for(g).dim)) << g.name();
  }
  EXPECT_TRUE(is_unitary(numeric(matrix_for(GateSpec::cx(0, 1))), 4));
  EXPECT_TRUE(is_unitary(numeric(matrix_for(GateSpec::cz(0, 1))), 4));
}

TEST(Matrix, SymbolicAngleEvaluates) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < kCases; ++i) {
    double t = testing::uniform(rng, -7.0, 7.0);
    auto sym = numeric(matrix_for(GateSpec::rz(0, RealTerm::var("t"))), Valuation{{"t", t}});
    auto lit = numeric(matrix_for(GateSpec::rz(0, t)));
    EXPECT_LT(testing::max_diff(sym, lit), 1e-12);
    EXPECT_TRUE(is_unitary(sym, 2));
  }
}

TEST(Matrix, CxIsPermutation) {
  auto u = numeric(matrix_for(GateSpec::cx(0, 1)));
  const int perm[4] = {0, 1, 3, 2};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(u[r * 4 + c], cd(c == perm[r] ? 1.0 : 0.0)) << r << "," << c;
}

TEST(Matrix, SwapExchangesMiddleEntries) {
  auto u = numeric(matrix_for(GateSpec::swap(0, 1)));
  const int perm[4] = {0, 2, 1, 3};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(u[r * 4 + c], cd(c == perm[r] ? 1.0 : 0.0));
}

TEST(Matrix, RkMatchesPhase) {
  for (int k = 1; k <= 6; ++k) {
    auto u = numeric(matrix_for(GateSpec::rk(0, RealTerm(double(k)))));
    EXPECT_NEAR(std::abs(u[3] - std::polar(1.0, 2 * std::numbers::pi / std::pow(2.0, k))), 0.0, 1e-12);
    EXPECT_EQ(u[0], cd(1.0));
  }
}

TEST(Matrix, MeasurementProjectors) {
  auto [m0, m1] = measurement_matrices();
  EXPECT_EQ(numeric(m0), (CMatrix{1.0, 0.0, 0.0, 0.0}));
  EXPECT_EQ(numeric(m1), (CMatrix{0.0, 0.0, 0.0, 1.0}));
}

TEST(Cis, FoldsClosedAngles) {
  ComplexTerm z = cis(RealTerm(std::numbers::pi / 2));
  EXPECT_TRUE(z.re.is_const());
  EXPECT_NEAR(z.im.value(), 1.0, 1e-15);
  ComplexTerm w = cis(RealTerm::var("a"));
  EXPECT_FALSE(w.re.is_const());
}

}  // namespace
}  // namespace qvsmt
