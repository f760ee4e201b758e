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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qvsmt {

// Closed interval with outward rounding done by stepping one ulp after every
// operation, so the rounding mode is never touched.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double v) : lo(v), hi(v) {}  // NOLINT
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  static Interval entire() {
    return {-std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }

  bool empty() const { return !(lo <= hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  double width() const { return hi - lo; }
  double mid() const {
    if (std::isinf(lo) && std::isinf(hi)) return 0.0;
    if (std::isinf(lo)) return hi > 0 ? 0.0 : hi - 1.0 - std::abs(hi);
    if (std::isinf(hi)) return lo < 0 ? 0.0 : lo + 1.0 + std::abs(lo);
    return lo + 0.5 * (hi - lo);
  }
  double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool is_point() const { return lo == hi; }
};

namespace ia {

inline double down(double x) {
  return std::isinf(x) ? x : std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double up(double x) {
  return std::isinf(x) ? x : std::nextafter(x, std::numeric_limits<double>::infinity());
}

inline double mul_lo(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return down(a * b);
}
inline double mul_hi(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return up(a * b);
}

}  // namespace ia

inline Interval operator+(Interval a, Interval b) {
  return {ia::down(a.lo + b.lo), ia::up(a.hi + b.hi)};
}
inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }
inline Interval operator-(Interval a, Interval b) {
  return {ia::down(a.lo - b.hi), ia::up(a.hi - b.lo)};
}
inline Interval operator*(Interval a, Interval b) {
  if (a.is_point() && b.is_point()) {
    double p = a.lo * b.lo;
    if (a.lo == 0.0 || b.lo == 0.0) return {0.0, 0.0};
    return {ia::down(p), ia::up(p)};
  }
  double l = std::min({ia::mul_lo(a.lo, b.lo), ia::mul_lo(a.lo, b.hi), ia::mul_lo(a.hi, b.lo),
                       ia::mul_lo(a.hi, b.hi)});
  double h = std::max({ia::mul_hi(a.lo, b.lo), ia::mul_hi(a.lo, b.hi), ia::mul_hi(a.hi, b.lo),
                       ia::mul_hi(a.hi, b.hi)});
  return {l, h};
}
inline Interval operator/(Interval a, Interval b) {
  if (b.lo <= 0.0 && b.hi >= 0.0) return Interval::entire();
  double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
  double l = *std::min_element(c, c + 4);
  double h = *std::max_element(c, c + 4);
  return {ia::down(l), ia::up(h)};
}

inline Interval hull(Interval a, Interval b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}
inline Interval intersect(Interval a, Interval b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

inline Interval sqr(Interval a) {
  double l = ia::mul_lo(a.lo, a.lo), h = ia::mul_hi(a.lo, a.lo);
  double l2 = ia::mul_lo(a.hi, a.hi), h2 = ia::mul_hi(a.hi, a.hi);
  if (a.lo >= 0.0) return {l, h2};
  if (a.hi <= 0.0) return {l2, h};
  return {0.0, std::max(h, h2)};
}

inline Interval pow_int(Interval a, unsigned e) {
  if (e == 0) return Interval(1.0);
  if (e == 1) return a;
  if (e % 2 == 0) return pow_int(sqr(a), e / 2);
  return a * pow_int(sqr(a), e / 2);
}

namespace ia {

// Widen a libm result by two ulps each side; libm sin/cos/exp are within one.
inline Interval widen(double l, double h, double clamp_lo, double clamp_hi) {
  for (int i = 0; i < 2; ++i) {
    l = down(l);
    h = up(h);
  }
  return {std::max(l, clamp_lo), std::min(h, clamp_hi)};
}

// True when some k satisfies lo <= offset + k*period <= hi (conservative).
inline bool hits(double lo, double hi, double offset, double period) {
  double kl = std::floor((lo - offset) / period) - 1;
  double kh = std::ceil((hi - offset) / period) + 1;
  for (double k = kl; k <= kh; k += 1.0) {
    double p = offset + k * period;
    double slack = 4 * std::numeric_limits<double>::epsilon() * (std::abs(p) + 1.0);
    if (p >= lo - slack && p <= hi + slack) return true;
  }
  return false;
}

}  // namespace ia

inline Interval cos(Interval a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a.empty()) return a;
  if (!(std::isfinite(a.lo) && std::isfinite(a.hi)) || a.width() >= two_pi) return {-1.0, 1.0};
  double cl = std::cos(a.lo), ch = std::cos(a.hi);
  double l = std::min(cl, ch), h = std::max(cl, ch);
  Interval r = ia::widen(l, h, -1.0, 1.0);
  if (ia::hits(a.lo, a.hi, 0.0, two_pi)) r.hi = 1.0;
  if (ia::hits(a.lo, a.hi, std::numbers::pi, two_pi)) r.lo = -1.0;
  return r;
}

inline Interval sin(Interval a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a.empty()) return a;
  if (!(std::isfinite(a.lo) && std::isfinite(a.hi)) || a.width() >= two_pi) return {-1.0, 1.0};
  double sl = std::sin(a.lo), sh = std::sin(a.hi);
  double l = std::min(sl, sh), h = std::max(sl, sh);
  Interval r = ia::widen(l, h, -1.0, 1.0);
  if (ia::hits(a.lo, a.hi, std::numbers::pi / 2, two_pi)) r.hi = 1.0;
  if (ia::hits(a.lo, a.hi, -std::numbers::pi / 2, two_pi)) r.lo = -1.0;
  return r;
}

inline Interval exp(Interval a) {
  return ia::widen(std::exp(a.lo), std::exp(a.hi), 0.0, std::numeric_limits<double>::infinity());
}

inline Interval log(Interval a) {
  if (a.hi <= 0.0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double l = a.lo <= 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a.lo);
  return ia::widen(l, std::log(a.hi), -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity());
}

// General power. Integer point exponents keep sign information; otherwise
// the base must be positive.
inline Interval pow(Interval base, Interval e) {
  if (e.is_point() && e.lo == std::floor(e.lo) && std::abs(e.lo) < 64) {
    int k = static_cast<int>(e.lo);
    if (k >= 0) return pow_int(base, static_cast<unsigned>(k));
    return Interval(1.0) / pow_int(base, static_cast<unsigned>(-k));
  }
  if (base.lo <= 0.0) return Interval::entire();
  return exp(e * log(base));
}

}  // namespace qvsmt
