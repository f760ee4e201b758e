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

#include "dsolve/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace qvsmt::dsolve {

Mono operator*(const Mono& a, const Mono& b) {
  Mono r;
  r.f.reserve(a.f.size() + b.f.size());
  std::size_t i = 0, j = 0;
  while (i < a.f.size() || j < b.f.size()) {
    if (j == b.f.size() || (i < a.f.size() && a.f[i].first < b.f[j].first)) {
      r.f.push_back(a.f[i++]);
    } else if (i == a.f.size() || b.f[j].first < a.f[i].first) {
      r.f.push_back(b.f[j++]);
    } else {
      r.f.emplace_back(a.f[i].first, a.f[i].second + b.f[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

namespace {

bool is_zero(const Interval& c) { return c.lo == 0.0 && c.hi == 0.0; }

Poly merge(const Poly& a, const Poly& b, bool negate_b) {
  Poly r;
  r.terms.reserve(a.terms.size() + b.terms.size());
  std::size_t i = 0, j = 0;
  while (i < a.terms.size() || j < b.terms.size()) {
    if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].first < b.terms[j].first)) {
      r.terms.push_back(a.terms[i++]);
    } else if (i == a.terms.size() || b.terms[j].first < a.terms[i].first) {
      const auto& t = b.terms[j++];
      r.terms.emplace_back(t.first, negate_b ? -t.second : t.second);
    } else {
      Interval c = negate_b ? a.terms[i].second - b.terms[j].second : a.terms[i].second + b.terms[j].second;
      if (!is_zero(c)) r.terms.emplace_back(a.terms[i].first, c);
      ++i;
      ++j;
    }
  }
  return r;
}

}  // namespace

Poly Poly::constant(Interval c) {
  Poly p;
  if (!is_zero(c)) p.terms.emplace_back(Mono{}, c);
  return p;
}

Poly Poly::atom(AtomId a) {
  Poly p;
  Mono m;
  m.f.emplace_back(a, 1);
  p.terms.emplace_back(std::move(m), Interval(1.0));
  return p;
}

Interval Poly::constant_part() const {
  if (!terms.empty() && terms[0].first.is_one()) return terms[0].second;
  return Interval(0.0);
}

std::size_t Poly::degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms) {
    std::size_t k = 0;
    for (const auto& f : m.f) k += f.second;
    d = std::max(d, k);
  }
  return d;
}

Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }

Poly operator-(const Poly& a) {
  Poly r = a;
  for (auto& t : r.terms) t.second = -t.second;
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.terms.empty() || b.terms.empty()) return Poly{};
  if (a.is_constant()) return scale(b, a.constant_part());
  if (b.is_constant()) return scale(a, b.constant_part());
  std::map<Mono, Interval> acc;
  for (const auto& [ma, ca] : a.terms) {
    for (const auto& [mb, cb] : b.terms) {
      Mono m = ma * mb;
      Interval c = ca * cb;
      auto it = acc.find(m);
      if (it == acc.end()) {
        acc.emplace(std::move(m), c);
      } else {
        it->second = it->second + c;
      }
    }
  }
  Poly r;
  r.terms.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (!is_zero(c)) r.terms.emplace_back(m, c);
  return r;
}

Poly scale(const Poly& a, Interval s) {
  if (is_zero(s)) return Poly{};
  if (s.lo == 1.0 && s.hi == 1.0) return a;
  Poly r;
  r.terms.reserve(a.terms.size());
  for (const auto& [m, c] : a.terms) {
    Interval x = c * s;
    if (!is_zero(x)) r.terms.emplace_back(m, x);
  }
  return r;
}

Poly pow(const Poly& a, unsigned e) {
  Poly r = Poly::constant(1.0);
  Poly base = a;
  while (e) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return r;
}

std::string key(const Poly& p) {
  std::string s;
  char buf[64];
  for (const auto& [m, c] : p.terms) {
    for (const auto& [a, e] : m.f) {
      std::snprintf(buf, sizeof(buf), "%u^%u.", a, e);
      s += buf;
    }
    std::snprintf(buf, sizeof(buf), "[%a,%a];", c.lo, c.hi);
    s += buf;
  }
  return s;
}

AtomId AtomTable::var_atom(int var) {
  auto it = var_index_.find(var);
  if (it != var_index_.end()) return it->second;
  AtomDef d;
  d.kind = AtomKind::Var;
  d.var = var;
  defs_.push_back(d);
  AtomId id = static_cast<AtomId>(defs_.size() - 1);
  var_index_.emplace(var, id);
  return id;
}

AtomId AtomTable::func_atom(AtomKind kind, const Poly& a, const Poly* b) {
  std::string k = std::to_string(static_cast<int>(kind)) + "|" + key(a);
  if (b) k += "|" + key(*b);
  auto it = index_.find(k);
  if (it != index_.end()) return it->second;
  AtomDef d;
  d.kind = kind;
  args_.push_back(a);
  d.arg0 = static_cast<int>(args_.size() - 1);
  if (b) {
    args_.push_back(*b);
    d.arg1 = static_cast<int>(args_.size() - 1);
  }
  defs_.push_back(d);
  AtomId id = static_cast<AtomId>(defs_.size() - 1);
  index_.emplace(std::move(k), id);
  return id;
}

Interval Evaluator::atom_value(AtomId a, const std::vector<Interval>& box) {
  if (icache_.size() < table_.size()) {
    icache_.resize(table_.size());
    istamp_.resize(table_.size(), 0);
  }
  if (istamp_[a] == stamp_) return icache_[a];
  const AtomDef& d = table_.def(a);
  Interval v;
  switch (d.kind) {
    case AtomKind::Var: v = box[d.var]; break;
    case AtomKind::Sin: v = sin(eval_inner(table_.arg(d.arg0), box)); break;
    case AtomKind::Cos: v = cos(eval_inner(table_.arg(d.arg0), box)); break;
    case AtomKind::Pow: v = qvsmt::pow(eval_inner(table_.arg(d.arg0), box), eval_inner(table_.arg(d.arg1), box)); break;
    case AtomKind::Inv: v = Interval(1.0) / eval_inner(table_.arg(d.arg0), box); break;
  }
  if (std::isnan(v.lo) || std::isnan(v.hi)) v = Interval::entire();
  icache_[a] = v;
  istamp_[a] = stamp_;
  return v;
}

double Evaluator::atom_point(AtomId a, const std::vector<double>& x) {
  if (pcache_.size() < table_.size()) {
    pcache_.resize(table_.size());
    pstamp_.resize(table_.size(), 0);
  }
  if (pstamp_[a] == stamp_) return pcache_[a];
  const AtomDef& d = table_.def(a);
  double v = 0.0;
  switch (d.kind) {
    case AtomKind::Var: v = x[d.var]; break;
    case AtomKind::Sin: v = std::sin(point_inner(table_.arg(d.arg0), x)); break;
    case AtomKind::Cos: v = std::cos(point_inner(table_.arg(d.arg0), x)); break;
    case AtomKind::Pow: v = std::pow(point_inner(table_.arg(d.arg0), x), point_inner(table_.arg(d.arg1), x)); break;
    case AtomKind::Inv: v = 1.0 / point_inner(table_.arg(d.arg0), x); break;
  }
  pcache_[a] = v;
  pstamp_[a] = stamp_;
  return v;
}

Interval Evaluator::eval_inner(const Poly& p, const std::vector<Interval>& box) {
  Interval s(0.0);
  for (const auto& [m, c] : p.terms) {
    Interval t = c;
    for (const auto& [a, e] : m.f) t = t * pow_int(atom_value(a, box), e);
    s = s + t;
  }
  return s;
}

double Evaluator::point_inner(const Poly& p, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms) {
    double t = c.mid();
    for (const auto& [a, e] : m.f) {
      double v = atom_point(a, x);
      for (std::uint32_t k = 0; k < e; ++k) t *= v;
    }
    s += t;
  }
  return s;
}

Interval Evaluator::eval(const Poly& p, const std::vector<Interval>& box) { return eval_inner(p, box); }

double Evaluator::eval_point(const Poly& p, const std::vector<double>& x) { return point_inner(p, x); }

void collect_vars(const Poly& p, const AtomTable& t, std::vector<int>& out) {
  for (const auto& [m, c] : p.terms) {
    for (const auto& [a, e] : m.f) {
      const AtomDef& d = t.def(a);
      if (d.kind == AtomKind::Var) {
        out.push_back(d.var);
      } else {
        collect_vars(t.arg(d.arg0), t, out);
        if (d.arg1 >= 0) collect_vars(t.arg(d.arg1), t, out);
      }
    }
  }
}

}  // namespace qvsmt::dsolve
