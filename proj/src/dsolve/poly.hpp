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

#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qvsmt/interval.hpp"

namespace qvsmt::dsolve {

using AtomId = std::uint32_t;

// Product of atoms with exponents, sorted by atom id.
struct Mono {
  std::vector<std::pair<AtomId, std::uint32_t>> f;

  bool operator<(const Mono& o) const { return f < o.f; }
  bool operator==(const Mono& o) const { return f == o.f; }
  bool is_one() const { return f.empty(); }
};

Mono operator*(const Mono& a, const Mono& b);

// Polynomial over atoms with interval coefficients. Coefficient intervals
// absorb every rounding error, so identities that cancel in exact arithmetic
// leave a coefficient enclosing zero rather than a wrong constant.
struct Poly {
  std::vector<std::pair<Mono, Interval>> terms;  // sorted by Mono, no exact zeros

  static Poly constant(Interval c);
  static Poly atom(AtomId a);

  bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].first.is_one()); }
  Interval constant_part() const;
  std::size_t degree() const;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator-(const Poly& a);
Poly operator*(const Poly& a, const Poly& b);
Poly scale(const Poly& a, Interval s);
Poly pow(const Poly& a, unsigned e);

std::string key(const Poly& p);

enum class AtomKind : std::uint8_t { Var, Sin, Cos, Pow, Inv };

struct AtomDef {
  AtomKind kind = AtomKind::Var;
  int var = -1;
  int arg0 = -1;
  int arg1 = -1;
};

class AtomTable {
 public:
  AtomId var_atom(int var);
  AtomId func_atom(AtomKind kind, const Poly& a, const Poly* b = nullptr);

  const AtomDef& def(AtomId a) const { return defs_[a]; }
  const Poly& arg(int i) const { return args_[i]; }
  std::size_t size() const { return defs_.size(); }

 private:
  std::vector<AtomDef> defs_;
  std::vector<Poly> args_;
  std::unordered_map<std::string, AtomId> index_;
  std::unordered_map<int, AtomId> var_index_;
};

// Interval and point evaluation with per-call atom caches.
class Evaluator {
 public:
  explicit Evaluator(const AtomTable& t) : table_(t) {}

  Interval eval(const Poly& p, const std::vector<Interval>& box);
  double eval_point(const Poly& p, const std::vector<double>& x);

  // Starts a new evaluation round; cached atom values are invalidated.
  void reset() { ++stamp_; }

 private:
  Interval atom_value(AtomId a, const std::vector<Interval>& box);
  double atom_point(AtomId a, const std::vector<double>& x);
  Interval eval_inner(const Poly& p, const std::vector<Interval>& box);
  double point_inner(const Poly& p, const std::vector<double>& x);

  const AtomTable& table_;
  std::vector<Interval> icache_;
  std::vector<double> pcache_;
  std::vector<std::uint64_t> istamp_;
  std::vector<std::uint64_t> pstamp_;
  std::uint64_t stamp_ = 1;
};

// Variables reachable from p, including those inside function atoms.
void collect_vars(const Poly& p, const AtomTable& t, std::vector<int>& out);

}  // namespace qvsmt::dsolve
