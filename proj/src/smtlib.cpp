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

#include "qvsmt/smtlib.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <numbers>
#include <set>
#include <variant>

namespace qvsmt {

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<SExpr> top;
  std::vector<SExpr> stack;
  int line = 1;
  std::size_t i = 0;
  auto push = [&](SExpr e) {
    if (stack.empty()) {
      top.push_back(std::move(e));
    } else {
      stack.back().list.push_back(std::move(e));
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      SExpr e;
      e.is_atom = false;
      e.line = line;
      stack.push_back(std::move(e));
      ++i;
    } else if (c == ')') {
      if (stack.empty()) throw ParseError("unbalanced ')'", line);
      SExpr e = std::move(stack.back());
      stack.pop_back();
      push(std::move(e));
      ++i;
    } else if (c == '|') {
      std::size_t j = text.find('|', i + 1);
      if (j == std::string_view::npos) throw ParseError("unterminated quoted symbol", line);
      SExpr e;
      e.atom = std::string(text.substr(i + 1, j - i - 1));
      e.line = line;
      push(std::move(e));
      i = j + 1;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != '"') ++j;
      SExpr e;
      e.atom = std::string(text.substr(i, j - i + 1));
      e.line = line;
      push(std::move(e));
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')' && text[j] != ';')
        ++j;
      SExpr e;
      e.atom = std::string(text.substr(i, j - i));
      e.line = line;
      push(std::move(e));
      i = j;
    }
  }
  if (!stack.empty()) throw ParseError("unbalanced '('", stack.back().line);
  return top;
}

std::string to_string(const SExpr& e) {
  if (e.is_atom) return e.atom;
  std::string s = "(";
  for (std::size_t i = 0; i < e.list.size(); ++i) {
    if (i) s += ' ';
    s += to_string(e.list[i]);
  }
  return s + ")";
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char c = s[0];
  if (!(std::isdigit(static_cast<unsigned char>(c)) || ((c == '-' || c == '.') && s.size() > 1)))
    return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

namespace {

using Value = std::variant<RealTerm, Constraint>;

class Reader {
 public:
  std::set<std::string> declared;
  std::function<std::optional<RealTerm>(const std::string&)> resolve;
  std::vector<std::map<std::string, Value>> scopes;

  Value read(const SExpr& e) {
    if (e.is_atom) return read_atom(e);
    if (e.list.empty()) throw ParseError("empty application", e.line);
    const SExpr& head = e.list[0];
    if (!head.is_atom) throw ParseError("unsupported higher-order head", e.line);
    const std::string& op = head.atom;
    std::size_t n = e.list.size() - 1;
    auto term = [&](std::size_t k) { return as_term(read(e.list[k]), e.list[k].line); };
    auto form = [&](std::size_t k) { return as_form(read(e.list[k]), e.list[k].line); };

    if (op == "let") {
      if (n != 2 || e.list[1].is_atom) throw ParseError("malformed let", e.line);
      std::map<std::string, Value> scope;
      for (const auto& b : e.list[1].list) {
        if (b.is_atom || b.list.size() != 2 || !b.list[0].is_atom) throw ParseError("malformed binding", b.line);
        scope.emplace(b.list[0].atom, read(b.list[1]));
      }
      scopes.push_back(std::move(scope));
      Value v = read(e.list[2]);
      scopes.pop_back();
      return v;
    }
    if (op == "+" || op == "*") {
      if (n == 0) throw ParseError("nullary " + op, e.line);
      RealTerm acc = term(1);
      for (std::size_t k = 2; k <= n; ++k) acc = op == "+" ? acc + term(k) : acc * term(k);
      return acc;
    }
    if (op == "-") {
      if (n == 1) {
        RealTerm a = term(1);
        return a.is_const() ? RealTerm(-a.value()) : -a;
      }
      RealTerm acc = term(1);
      for (std::size_t k = 2; k <= n; ++k) acc = acc - term(k);
      return acc;
    }
    if (op == "/") {
      if (n < 2) throw ParseError("'/' needs two operands", e.line);
      RealTerm acc = term(1);
      for (std::size_t k = 2; k <= n; ++k) acc = acc / term(k);
      return acc;
    }
    if (op == "sin" || op == "cos") {
      if (n != 1) throw ParseError(op + " takes one argument", e.line);
      return op == "sin" ? sin_t(term(1)) : cos_t(term(1));
    }
    if (op == "^" || op == "pow") {
      if (n != 2) throw ParseError(op + " takes two arguments", e.line);
      return pow_t(term(1), term(2));
    }
    if (op == "=" || op == "<=" || op == "<" || op == ">=" || op == ">") {
      if (n < 2) throw ParseError(op + " needs two operands", e.line);
      Rel r = op == "=" ? Rel::Eq : op == "<=" ? Rel::Le : op == "<" ? Rel::Lt : op == ">=" ? Rel::Ge : Rel::Gt;
      // `=` over formulas is an iff
      if (r == Rel::Eq && std::holds_alternative<Constraint>(read(e.list[1]))) {
        Constraint a = form(1), b = form(2);
        return Constraint::conj({Constraint::implies(a, b), Constraint::implies(b, a)});
      }
      std::vector<Constraint> parts;
      for (std::size_t k = 1; k < n; ++k) parts.push_back(Constraint::atom(r, term(k), term(k + 1)));
      return Constraint::conj(std::move(parts));
    }
    if (op == "and" || op == "or") {
      std::vector<Constraint> kids;
      for (std::size_t k = 1; k <= n; ++k) kids.push_back(form(k));
      return op == "and" ? Constraint::conj(std::move(kids)) : Constraint::disj(std::move(kids));
    }
    if (op == "not") {
      if (n != 1) throw ParseError("not takes one argument", e.line);
      return Constraint::negation(form(1));
    }
    if (op == "=>") {
      if (n < 2) throw ParseError("=> needs two operands", e.line);
      Constraint acc = form(n);
      for (std::size_t k = n - 1; k >= 1; --k) acc = Constraint::implies(form(k), acc);
      return acc;
    }
    if (op == "ite") {
      if (n != 3) throw ParseError("ite takes three arguments", e.line);
      Constraint c = form(1);
      Value a = read(e.list[2]);
      if (!std::holds_alternative<Constraint>(a)) throw ParseError("term-level ite is not supported", e.line);
      Constraint b = form(3);
      return Constraint::conj({Constraint::implies(c, std::get<Constraint>(a)),
                               Constraint::implies(Constraint::negation(c), b)});
    }
    throw ParseError("unknown operator '" + op + "'", e.line);
  }

  static RealTerm as_term(const Value& v, int line) {
    if (auto* t = std::get_if<RealTerm>(&v)) return *t;
    throw ParseError("expected a real term", line);
  }
  static Constraint as_form(const Value& v, int line) {
    if (auto* c = std::get_if<Constraint>(&v)) return *c;
    throw ParseError("expected a formula", line);
  }

 private:
  Value read_atom(const SExpr& e) {
    const std::string& s = e.atom;
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(s);
      if (f != it->end()) return f->second;
    }
    if (s == "true") return Constraint::truth();
    if (s == "false") return Constraint::falsity();
    if (s == "pi") return RealTerm::pi();
    double v;
    if (parse_number(s, v)) return RealTerm(v);
    if (resolve) {
      if (auto t = resolve(s)) return *t;
    }
    if (!declared.count(s)) throw ParseError("undeclared symbol '" + s + "'", e.line);
    return RealTerm::var(s);
  }
};

}  // namespace

RealTerm parse_term(const SExpr& e, const std::function<std::optional<RealTerm>(const std::string&)>& resolve) {
  Reader rd;
  rd.resolve = resolve;
  return Reader::as_term(rd.read(e), e.line);
}

ParsedScript parse_smtlib(std::string_view text) {
  ParsedScript out;
  Reader rd;
  for (const auto& cmd : parse_sexprs(text)) {
    if (cmd.is_atom || cmd.list.empty() || !cmd.list[0].is_atom) throw ParseError("expected a command", cmd.line);
    const std::string& c = cmd.list[0].atom;
    if (c == "set-logic") {
      if (cmd.list.size() != 2) throw ParseError("malformed set-logic", cmd.line);
      out.logic = cmd.list[1].atom;
    } else if (c == "declare-fun" || c == "declare-const") {
      std::size_t sort_at = c == "declare-fun" ? 3 : 2;
      if (cmd.list.size() != sort_at + 1 || !cmd.list[1].is_atom)
        throw ParseError("malformed " + c, cmd.line);
      if (c == "declare-fun" && (cmd.list[2].is_atom || !cmd.list[2].list.empty()))
        throw ParseError("only nullary functions are supported", cmd.line);
      const auto& sort = cmd.list[sort_at];
      if (!sort.is_atom || (sort.atom != "Real" && sort.atom != "Int"))
        throw ParseError("unsupported sort " + to_string(sort), cmd.line);
      if (!rd.declared.insert(cmd.list[1].atom).second)
        throw ParseError("duplicate declaration of " + cmd.list[1].atom, cmd.line);
      out.decls.push_back(cmd.list[1].atom);
    } else if (c == "assert") {
      if (cmd.list.size() != 2) throw ParseError("malformed assert", cmd.line);
      out.assertions.push_back(Reader::as_form(rd.read(cmd.list[1]), cmd.line));
    } else if (c == "check-sat" || c == "exit" || c == "set-option" || c == "set-info" || c == "get-model" ||
               c == "push" || c == "pop") {
      continue;
    } else {
      throw ParseError("unsupported command '" + c + "'", cmd.line);
    }
  }
  return out;
}

}  // namespace qvsmt
