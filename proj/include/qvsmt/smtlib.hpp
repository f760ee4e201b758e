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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qvsmt/expr.hpp"

namespace qvsmt {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Generic s-expression, shared by the SMT-LIB2 reader and the spec format.
struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> list;
  int line = 0;
};

std::vector<SExpr> parse_sexprs(std::string_view text);
std::string to_string(const SExpr& e);

struct ParsedScript {
  std::string logic;
  std::vector<std::string> decls;
  std::vector<Constraint> assertions;
};

/// Reads the QF_NRA fragment we emit plus common extras (let, ite over
/// formulas, chained comparisons, declare-const, set-option, get-model).
ParsedScript parse_smtlib(std::string_view text);

/// Real term in SMT-LIB syntax; symbols other than `pi` go through resolve.
RealTerm parse_term(const SExpr& e, const std::function<std::optional<RealTerm>(const std::string&)>& resolve);

/// Numeric literal in SMT-LIB decimal/integer syntax, also accepting
/// scientific notation.
bool parse_number(const std::string& s, double& out);

}  // namespace qvsmt
