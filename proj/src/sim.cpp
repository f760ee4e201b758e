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


#include "qvsmt/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace qvsmt {

DenseState DenseState::zero(int n) {
  DenseState s;
  s.n_qubits = n;
  s.amps.assign(std::size_t{1} << n, Amp{});
  s.amps[0] = 1.0;
  return s;
}

double DenseState::norm2() const { return kernels::norm2_serial(amps); }

namespace kernels {

namespace {

struct Layout {
  std::vector<int> sorted_pos;  // ascending bit positions of the op qubits
  std::vector<std::size_t> offset;  // matrix index -> amplitude offset
  std::size_t blocks = 0;
};

Layout layout(int n, const std::vector<int>& qubits) {
  const int k = static_cast<int>(qubits.size());
  Layout l;
  for (int q : qubits) l.sorted_pos.push_back(n - 1 - q);
  std::sort(l.sorted_pos.begin(), l.sorted_pos.end());
  l.offset.assign(std::size_t{1} << k, 0);
  for (std::size_t m = 0; m < l.offset.size(); ++m)
    for (int j = 0; j < k; ++j)
      if ((m >> (k - 1 - j)) & 1u) l.offset[m] |= std::size_t{1} << (n - 1 - qubits[j]);
  l.blocks = std::size_t{1} << (n - k);
  return l;
}

inline std::size_t spread(std::size_t b, const std::vector<int>& sorted_pos) {
  for (int p : sorted_pos) {
    const std::size_t low = b & ((std::size_t{1} << p) - 1);
    b = ((b >> p) << (p + 1)) | low;
  }
  return b;
}

inline void apply_block(std::vector<Amp>& psi, const CMatrix& u, const Layout& l, std::size_t b, std::vector<Amp>& in) {
  const std::size_t dim = l.offset.size();
  const std::size_t base = spread(b, l.sorted_pos);
  for (std::size_t c = 0; c < dim; ++c) in[c] = psi[base + l.offset[c]];
  for (std::size_t r = 0; r < dim; ++r) {
    Amp acc{};
    for (std::size_t c = 0; c < dim; ++c) acc += u[r * dim + c] * in[c];
    psi[base + l.offset[r]] = acc;
  }
}

inline bool matches(std::size_t i, int n, const std::vector<int>& qubits, const std::vector<int>& bits) {
  for (std::size_t j = 0; j < qubits.size(); ++j)
    if (static_cast<int>((i >> (n - 1 - qubits[j])) & 1u) != bits[j]) return false;
  return true;
}

}  // namespace

void apply_matrix_serial(std::vector<Amp>& psi, int n, const CMatrix& u, const std::vector<int>& qubits) {
  const Layout l = layout(n, qubits);
  std::vector<Amp> in(l.offset.size());
  for (std::size_t b = 0; b < l.blocks; ++b) apply_block(psi, u, l, b, in);
}

void apply_matrix_parallel(std::vector<Amp>& psi, int n, const CMatrix& u, const std::vector<int>& qubits) {
  const Layout l = layout(n, qubits);
  const auto blocks = static_cast<long long>(l.blocks);
#pragma omp parallel
  {
    std::vector<Amp> in(l.offset.size());
#pragma omp for schedule(static)
    for (long long b = 0; b < blocks; ++b) apply_block(psi, u, l, static_cast<std::size_t>(b), in);
  }
}

double project_serial(std::vector<Amp>& psi, int n, const std::vector<int>& qubits, const std::vector<int>& bits) {
  double kept = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (matches(i, n, qubits, bits)) {
      kept += std::norm(psi[i]);
    } else {
      psi[i] = 0.0;
    }
  }
  return kept;
}

double project_parallel(std::vector<Amp>& psi, int n, const std::vector<int>& qubits, const std::vector<int>& bits) {
  double kept = 0.0;
  const auto size = static_cast<long long>(psi.size());
#pragma omp parallel for reduction(+ : kept) schedule(static)
  for (long long i = 0; i < size; ++i) {
    if (matches(static_cast<std::size_t>(i), n, qubits, bits)) {
      kept += std::norm(psi[i]);
    } else {
      psi[i] = 0.0;
    }
  }
  return kept;
}

double norm2_serial(const std::vector<Amp>& psi) {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return s;
}

double norm2_parallel(const std::vector<Amp>& psi) {
  double s = 0.0;
  const auto size = static_cast<long long>(psi.size());
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (long long i = 0; i < size; ++i) s += std::norm(psi[i]);
  return s;
}

}  // namespace kernels

namespace {

constexpr double kZeroBranch = 1e-12;

// States along one branch. A branch of probability zero throws when strict,
// otherwise continues with the zero vector.
RunResult run_impl(const ProgramModel& p, const std::vector<Amp>& input, const std::string& choice,
                   const SimOptions& opts, bool strict) {
  if (input.size() != (std::size_t{1} << p.n_qubits)) throw std::invalid_argument("input has the wrong dimension");
  if (static_cast<int>(choice.size()) != p.measured_count())
    throw std::invalid_argument("branch choice must have one bit per measured qubit");
  RunResult r;
  DenseState cur;
  cur.n_qubits = p.n_qubits;
  cur.amps = input;
  r.states.push_back(cur);
  for (std::size_t i = 0; i < p.ops.size(); ++i) {
    const StateOp& op = p.ops[i];
    if (op.kind == StateOp::Kind::Gate) {
      CMatrix u = numeric(matrix_for(op.gate), opts.params);
      if (opts.parallel) {
        kernels::apply_matrix_parallel(cur.amps, p.n_qubits, u, op.gate.qubits());
      } else {
        kernels::apply_matrix_serial(cur.amps, p.n_qubits, u, op.gate.qubits());
      }
    } else {
      const int at = p.measured_before(static_cast<int>(i));
      std::vector<int> bits;
      for (std::size_t j = 0; j < op.measured.size(); ++j) bits.push_back(choice[at + j] == '1');
      const double kept = opts.parallel ? kernels::project_parallel(cur.amps, p.n_qubits, op.measured, bits)
                                        : kernels::project_serial(cur.amps, p.n_qubits, op.measured, bits);
      if (kept < kZeroBranch) {
        if (strict) throw ZeroProbabilityBranch("branch " + choice + " has probability " + std::to_string(kept));
        std::fill(cur.amps.begin(), cur.amps.end(), Amp{});
        r.probability = 0.0;
      } else {
        const double s = 1.0 / std::sqrt(kept);
        for (auto& a : cur.amps) a *= s;
        r.probability *= kept;
      }
    }
    r.states.push_back(cur);
  }
  return r;
}

std::vector<Amp> kron(const std::vector<Amp>& a, const std::vector<Amp>& b) {
  std::vector<Amp> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

std::vector<Amp> qubit_vec(Amp a, Amp b) {
  auto [x, y] = strip_phase(a, b);
  return {x, y};
}

}  // namespace

RunResult run_concrete(const ProgramModel& p, const std::vector<Amp>& input, const std::string& branch_choice,
                       const SimOptions& opts) {
  return run_impl(p, input, branch_choice, opts, true);
}

std::vector<Amp> product_state(const std::vector<std::pair<Amp, Amp>>& qubits) {
  std::vector<Amp> v{1.0};
  for (const auto& [a, b] : qubits) v = kron(v, qubit_vec(a, b));
  return v;
}

std::vector<std::vector<Amp>> enumerate_inputs(const ProgramModel& p) {
  std::vector<std::vector<Amp>> acc{{1.0}};
  for (const auto& init : p.inits) {
    std::vector<std::vector<Amp>> opts;
    switch (init.kind) {
      case InitSpec::Kind::FullHilbert:
        throw std::invalid_argument("qubit " + std::to_string(init.qubits[0]) + " ranges over the full Hilbert space");
      case InitSpec::Kind::BasisSet:
        for (int bit : init.basis) opts.push_back(bit ? std::vector<Amp>{0.0, 1.0} : std::vector<Amp>{1.0, 0.0});
        break;
      case InitSpec::Kind::Concrete: opts.push_back(qubit_vec(init.amps[0], init.amps[1])); break;
      case InitSpec::Kind::Joint: opts.push_back(init.amps); break;
    }
    std::vector<std::vector<Amp>> next;
    for (const auto& a : acc)
      for (const auto& o : opts) next.push_back(kron(a, o));
    acc = std::move(next);
  }
  return acc;
}

std::vector<Amp> sample_input(const ProgramModel& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Amp> v{1.0};
  for (const auto& init : p.inits) {
    switch (init.kind) {
      case InitSpec::Kind::FullHilbert: {
        const double theta = std::acos(1.0 - 2.0 * u(rng));
        const double phi = 2.0 * std::numbers::pi * u(rng);
        v = kron(v, qubit_vec(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)));
        break;
      }
      case InitSpec::Kind::BasisSet: {
        const int bit = init.basis[static_cast<std::size_t>(u(rng) * init.basis.size()) % init.basis.size()];
        v = kron(v, bit ? std::vector<Amp>{0.0, 1.0} : std::vector<Amp>{1.0, 0.0});
        break;
      }
      case InitSpec::Kind::Concrete: v = kron(v, qubit_vec(init.amps[0], init.amps[1])); break;
      case InitSpec::Kind::Joint: v = kron(v, init.amps); break;
    }
  }
  return v;
}

std::optional<std::pair<Amp, Amp>> reduced_qubit(const DenseState& s, int qubit, double tol) {
  const std::size_t bit = std::size_t{1} << (s.n_qubits - 1 - qubit);
  double best = -1.0;
  Amp x, y;
  for (std::size_t i = 0; i < s.amps.size(); ++i) {
    if (i & bit) continue;
    const double m = std::norm(s.amps[i]) + std::norm(s.amps[i | bit]);
    if (m > best) {
      best = m;
      x = s.amps[i];
      y = s.amps[i | bit];
    }
  }
  if (best <= 0.0) return std::pair<Amp, Amp>{0.0, 0.0};
  const double r = std::sqrt(best);
  x /= r;
  y /= r;
  const double scale = std::sqrt(s.norm2());
  for (std::size_t i = 0; i < s.amps.size(); ++i) {
    if (i & bit) continue;
    if (std::abs(s.amps[i] * y - s.amps[i | bit] * x) > tol * scale) return std::nullopt;
  }
  return strip_phase(x, y);
}

SimView::SimView(const ProgramModel& p, const std::vector<Amp>& input, const SimOptions& opts)
    : n_(p.n_qubits), labels_(qvsmt::branch_labels(p)), params_(opts.params) {
  for (int s = 0; s < p.state_count(); ++s) measured_before_.push_back(p.measured_before(s));
  for (const auto& l : labels_) {
    RunResult r = run_impl(p, input, l, opts, false);
    runs_[l] = std::move(r.states);
    prob_[l] = r.probability;
  }
}

const DenseState& SimView::state(int s, const std::string& branch) const {
  if (s < 0 || s >= state_count()) throw UnresolvedSymRef("no state " + std::to_string(s));
  for (const auto& l : labels_)
    if (l.compare(0, branch.size(), branch) == 0 && branch.size() <= l.size()) return runs_.at(l)[s];
  throw UnresolvedSymRef("no branch '" + branch + "'");
}

std::vector<std::pair<ComplexTerm, ComplexTerm>> SimView::qubit_pairs(int state, int qubit,
                                                                      const std::string& branch) const {
  const DenseState& d = this->state(state, branch);
  if (qubit < 0 || qubit >= n_) throw UnresolvedSymRef("no qubit " + std::to_string(qubit));
  const std::size_t bit = std::size_t{1} << (n_ - 1 - qubit);
  std::vector<std::pair<ComplexTerm, ComplexTerm>> out;
  for (std::size_t i = 0; i < d.amps.size(); ++i)
    if (!(i & bit)) out.emplace_back(ComplexTerm::from(d.amps[i]), ComplexTerm::from(d.amps[i | bit]));
  return out;
}

ComplexTerm SimView::amplitude(int state, std::size_t index, const std::string& branch) const {
  const DenseState& d = this->state(state, branch);
  if (index >= d.amps.size()) throw UnresolvedSymRef("amplitude index " + std::to_string(index) + " out of range");
  return ComplexTerm::from(d.amps[index]);
}

RealTerm SimView::component(int state, int qubit, const std::string& branch, Role role) const {
  if (qubit < 0 || qubit >= n_) throw UnresolvedSymRef("no qubit " + std::to_string(qubit));
  auto q = reduced_qubit(this->state(state, branch), qubit);
  if (!q) throw UnresolvedSymRef("qubit " + std::to_string(qubit) + " is entangled at state " + std::to_string(state));
  const auto [x, y] = *q;
  switch (role) {
    case Role::Alpha: return x.real();
    case Role::AlphaIm: return x.imag();
    case Role::BetaRe: return y.real();
    case Role::BetaIm: return y.imag();
    case Role::Theta: return 2.0 * std::atan2(std::abs(y), std::abs(x));
    case Role::Phi: {
      if (std::abs(y) < 1e-12) return 0.0;
      double a = std::arg(y);
      return a < 0 ? a + 2.0 * std::numbers::pi : a;
    }
    default: throw UnresolvedSymRef("amplitude role used as a qubit component");
  }
}

RealTerm SimView::param(const std::string& name) const {
  auto it = params_.find(param_var(name));
  if (it == params_.end()) throw UnresolvedSymRef("no value for parameter " + name);
  return it->second;
}

EnumResult enumerate_verify(const ProgramModel& p, const SpecFormula& f, const std::vector<std::vector<Amp>>& inputs,
                            const SimOptions& opts, double tol) {
  const SpecFormula expanded = expand_branches(f, branch_labels(p));
  SimOptions inner = opts;
  inner.parallel = false;
  const auto count = static_cast<long long>(inputs.size());
  std::vector<double> viol(inputs.size(), 0.0);
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      SimView view(p, inputs[i], inner);
      viol[i] = violation(expanded, view);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  EnumResult r;
  r.cases = inputs.size();
  for (std::size_t i = 0; i < viol.size(); ++i) {
    r.worst = std::max(r.worst, viol[i]);
    if (viol[i] > tol && r.pass) {
      r.pass = false;
      r.failing_input = i;
    }
  }
  return r;
}

}  // namespace qvsmt
