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


// Standalone delta-complete solver for SMT-LIB2 QF_NRA scripts with sin/cos.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qvsmt/dsolve.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qsolve: delta-complete QF_NRA solver"};
  std::string path;
  qvsmt::dsolve::Options opt;
  bool model = false;
  app.set_version_flag("--version", "qsolve 1.0");
  app.add_option("file", path, "SMT-LIB2 script ('-' reads stdin)")->required();
  app.add_option("--precision", opt.delta, "delta")->check(CLI::PositiveNumber);
  app.add_option("--timeout", opt.timeout_s, "seconds, 0 for none");
  app.add_option("--seed", opt.seed, "local search seed");
  app.add_option("--max-boxes", opt.max_boxes, "bisection budget");
  app.add_flag("--model", model, "print a witness on delta-sat");
  app.add_flag("--verbose", opt.verbose, "diagnostics on stderr");
  CLI11_PARSE(app, argc, argv);

  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) {
      std::fprintf(stderr, "qsolve: cannot open %s\n", path.c_str());
      return 2;
    }
    buf << in.rdbuf();
  }
  try {
    auto script = qvsmt::parse_smtlib(buf.str());
    auto res = qvsmt::dsolve::solve(script, opt);
    std::fputs(qvsmt::dsolve::format_result(res, opt.delta, model).c_str(), stdout);
    if (opt.verbose) {
      std::fprintf(stderr, "nodes=%ld boxes=%ld farkas=%ld local=%ld %s\n", res.stats.nodes, res.stats.boxes,
                   res.stats.farkas_refutations, res.stats.local_searches, res.reason.c_str());
    }
  } catch (const qvsmt::ParseError& e) {
    std::fprintf(stderr, "qsolve: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qsolve: %s\n", e.what());
    return 2;
  }
  return 0;
}
