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


#include "qvsmt/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qvsmt {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::optional<double> closed_value(const RealTerm& t) {
  try {
    return evaluate(t, Valuation{});
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

RealTerm cos_c(const RealTerm& t) {
  if (auto v = closed_value(t)) return std::cos(*v);
  return cos_t(t);
}

RealTerm sin_c(const RealTerm& t) {
  if (auto v = closed_value(t)) return std::sin(*v);
  return sin_t(t);
}

ComplexTerm c0() { return {0.0, 0.0}; }
ComplexTerm c1() { return {1.0, 0.0}; }

GateMatrix square(std::size_t dim) {
  GateMatrix m;
  m.dim = dim;
  m.e.assign(dim * dim, c0());
  return m;
}

GateMatrix diag2(const ComplexTerm& a, const ComplexTerm& b) {
  GateMatrix m = square(2);
  m.e[0] = a;
  m.e[3] = b;
  return m;
}

DirectMapping single(std::function<QubitAmp(const QubitAmp&)> f) {
  DirectMapping m;
  m.apply = [f = std::move(f)](const std::vector<QubitAmp>& q) { return std::vector<QubitAmp>{f(q[0])}; };
  return m;
}

}  // namespace

ComplexTerm cis(const RealTerm& angle) {
  if (auto v = closed_value(angle)) return ComplexTerm::from(std::polar(1.0, *v));
  return ComplexTerm::phase(angle);
}

RealTerm rk_angle(const RealTerm& k) {
  if (auto v = closed_value(k)) return 2.0 * std::numbers::pi * std::exp2(-*v);
  return RealTerm(2.0) * RealTerm::pi() * pow_t(2.0, -k);
}

GateMatrix GateMatrix::identity(std::size_t dim) {
  GateMatrix m = square(dim);
  for (std::size_t i = 0; i < dim; ++i) m.e[i * dim + i] = c1();
  return m;
}

std::optional<DirectMapping> mapping_for(const GateSpec& g) {
  switch (g.kind) {
    case GateKind::Identity: return single([](const QubitAmp& q) { return q; });
    case GateKind::X: return single([](const QubitAmp& q) { return QubitAmp{q.beta, q.alpha}; });
    case GateKind::Z: return single([](const QubitAmp& q) { return QubitAmp{q.alpha, -q.beta}; });
    case GateKind::H:
      return single([](const QubitAmp& q) {
        return QubitAmp{RealTerm(kInvSqrt2) * (q.alpha + q.beta), RealTerm(kInvSqrt2) * (q.alpha - q.beta)};
      });
    case GateKind::RX: {
      RealTerm half = RealTerm(0.5) * g.param;
      RealTerm c = cos_c(half), s = sin_c(half);
      ComplexTerm mis{0.0, -s};
      return single([c, mis](const QubitAmp& q) {
        return QubitAmp{c * q.alpha + mis * q.beta, mis * q.alpha + c * q.beta};
      });
    }
    case GateKind::RZ:
    case GateKind::Rk: {
      ComplexTerm ph = cis(g.kind == GateKind::RZ ? g.param : rk_angle(g.param));
      return single([ph](const QubitAmp& q) { return QubitAmp{q.alpha, ph * q.beta}; });
    }
    case GateKind::SWAP: {
      DirectMapping m;
      m.n_targets = 2;
      m.apply = [](const std::vector<QubitAmp>& q) { return std::vector<QubitAmp>{q[1], q[0]}; };
      return m;
    }
    case GateKind::CX:
    case GateKind::CZ: {
      auto m = mapping_for(g.kind == GateKind::CX ? GateSpec::x(g.targets[1]) : GateSpec::z(g.targets[1]));
      m->n_controls = 1;
      m->basis_control_only = true;
      return m;
    }
    case GateKind::Controlled: {
      auto m = mapping_for(*g.base);
      if (!m) return std::nullopt;
      m->n_controls = static_cast<int>(g.controls.size());
      m->basis_control_only = true;
      return m;
    }
    case GateKind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

GateMatrix matrix_for(const GateSpec& g) {
  switch (g.kind) {
    case GateKind::Identity: return GateMatrix::identity(2);
    case GateKind::X: {
      GateMatrix m = square(2);
      m.e[1] = c1();
      m.e[2] = c1();
      return m;
    }
    case GateKind::Z: return diag2(c1(), {-1.0, 0.0});
    case GateKind::H: {
      GateMatrix m = square(2);
      m.e = {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}};
      return m;
    }
    case GateKind::RX: {
      RealTerm half = RealTerm(0.5) * g.param;
      ComplexTerm c{cos_c(half), 0.0}, mis{0.0, -sin_c(half)};
      GateMatrix m = square(2);
      m.e = {c, mis, mis, c};
      return m;
    }
    case GateKind::RZ: return diag2(c1(), cis(g.param));
    case GateKind::Rk: return diag2(c1(), cis(rk_angle(g.param)));
    case GateKind::SWAP: {
      GateMatrix m = square(4);
      m.e[0 * 4 + 0] = c1();
      m.e[1 * 4 + 2] = c1();
      m.e[2 * 4 + 1] = c1();
      m.e[3 * 4 + 3] = c1();
      return m;
    }
    case GateKind::CX:
    case GateKind::CZ: {
      GateSpec base = g.kind == GateKind::CX ? GateSpec::x(g.targets[1]) : GateSpec::z(g.targets[1]);
      return matrix_for(GateSpec::controlled(base, {g.targets[0]}));
    }
    case GateKind::Controlled: {
      GateMatrix b = matrix_for(*g.base);
      std::size_t dim = b.dim << g.controls.size();
      GateMatrix m = GateMatrix::identity(dim);
      std::size_t off = dim - b.dim;
      for (std::size_t r = 0; r < b.dim; ++r)
        for (std::size_t c = 0; c < b.dim; ++c) m.e[(off + r) * dim + off + c] = b.at(r, c);
      return m;
    }
    case GateKind::Custom: {
      GateMatrix m;
      m.dim = std::size_t{1} << g.targets.size();
      m.e = g.matrix;
      return m;
    }
  }
  throw std::invalid_argument("no matrix for gate " + g.name());
}

std::pair<GateMatrix, GateMatrix> measurement_matrices() { return {diag2(c1(), c0()), diag2(c0(), c1())}; }

CMatrix numeric(const GateMatrix& m, const Valuation& v) {
  CMatrix out(m.e.size());
  for (std::size_t i = 0; i < m.e.size(); ++i) out[i] = evaluate(m.e[i], v);
  return out;
}

bool is_unitary(const CMatrix& u, std::size_t dim, double tol) {
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      std::complex<double> s = 0;
      for (std::size_t k = 0; k < dim; ++k) s += std::conj(u[k * dim + i]) * u[k * dim + j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  return true;
}

std::vector<CQubit> apply_numeric(const DirectMapping& m, const std::vector<CQubit>& qubits, const Valuation& v) {
  bool fire = true;
  for (int c = 0; c < m.n_controls; ++c) {
    const CQubit& q = qubits[c];
    if (std::abs(q[0]) < 1e-12) continue;
    if (std::abs(q[1]) < 1e-12) {
      fire = false;
      continue;
    }
    throw std::invalid_argument("control qubit is not a basis state");
  }
  std::vector<CQubit> out = qubits;
  if (!fire) return out;
  std::vector<QubitAmp> in;
  for (int t = 0; t < m.n_targets; ++t) {
    const CQubit& q = qubits[m.n_controls + t];
    in.push_back({ComplexTerm::from(q[0]), ComplexTerm::from(q[1])});
  }
  auto res = m.apply(in);
  for (int t = 0; t < m.n_targets; ++t) out[m.n_controls + t] = {evaluate(res[t].alpha, v), evaluate(res[t].beta, v)};
  return out;
}

}  // namespace qvsmt
