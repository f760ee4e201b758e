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
#include <utility>
#include <vector>

#include "qvsmt/interval.hpp"
#include "qvsmt/smtlib.hpp"

// Delta-complete decision procedure for the QF_NRA fragment with sin/cos.
//
// "unsat" is only reported when every case is refuted with outward-rounded
// interval arithmetic. "delta-sat" is only reported with a point at which the
// delta-weakening of every original assertion holds.
namespace qvsmt::dsolve {

struct Options {
  double delta = 1e-3;
  double timeout_s = 0.0;  // 0 = none
  std::uint64_t seed = 1;
  long max_boxes = 400000;
  int restarts = 24;
  bool verbose = false;
};

enum class Status { Unsat, DeltaSat, Unknown };

struct Stats {
  long nodes = 0;
  long boxes = 0;
  long farkas_refutations = 0;
  long local_searches = 0;
};

struct Result {
  Status status = Status::Unknown;
  std::vector<std::pair<std::string, Interval>> model;  // declaration order
  std::string reason;
  Stats stats;
};

Result solve(const ParsedScript& script, const Options& opts);

/// dReal-style output: "unsat", or "delta-sat with delta = D" followed by
/// `name : [lo, hi]` lines, or "unknown".
std::string format_result(const Result& r, double delta, bool with_model);

}  // namespace qvsmt::dsolve
