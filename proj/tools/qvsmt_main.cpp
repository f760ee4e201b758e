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


// qvsmt: verify, simulate and dump quantum circuits.
//
//   qvsmt verify --bench tp --mode exact --delta 1e-4
//   qvsmt verify --program circuit.qpm --spec circuit.qspec --json report.json
//   qvsmt simulate --bench qft --size 3
//   qvsmt dump-smt --bench tp --out tp.smt2
//   qvsmt bench --jobs 4

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qvsmt/benchmarks.hpp"
#include "qvsmt/sim.hpp"
#include "qvsmt/smtlib.hpp"
#include "qvsmt/solver.hpp"

namespace {

using namespace qvsmt;

constexpr int kExitError = 2;

struct Source {
  std::string bench;
  int size = 0;
  std::string mutate;
  std::string program;
  std::string spec;
};

struct Loaded {
  ProgramModel program;
  Spec spec;
  Mode mode = Mode::Exact;
  std::string label;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Loaded load(const Source& src) {
  Loaded l;
  if (!src.bench.empty()) {
    Benchmark b = generate(src.bench, src.size, src.mutate);
    l.program = std::move(b.program);
    l.spec = std::move(b.spec);
    l.mode = b.mode;
    l.label = b.name + (b.size ? "-" + std::to_string(b.size) : "") + (b.mutation.empty() ? "" : "/" + b.mutation);
    return l;
  }
  if (src.program.empty()) throw CLI::ValidationError("--bench or --program is required");
  l.program = parse_qpm(slurp(src.program));
  if (!src.spec.empty()) l.spec = parse_qspec(slurp(src.spec));
  l.label = src.program;
  return l;
}

void add_source(CLI::App* cmd, Source& s) {
  cmd->add_option("--bench", s.bench, "benchmark name")
      ->check(CLI::IsMember({"toffoli", "tp", "add", "qft", "qpe", "gdo"}));
  cmd->add_option("--size", s.size, "benchmark size n");
  cmd->add_option("--mutate", s.mutate, "fault injection (tp: drop-cz, drop-cx; toffoli: drop-x; gdo: sign-flip)");
  cmd->add_option("--program", s.program, ".qpm circuit file")->check(CLI::ExistingFile)->excludes("--bench");
  cmd->add_option("--spec", s.spec, ".qspec specification file")->check(CLI::ExistingFile)->excludes("--bench");
}

struct ModeOpt {
  std::string mode;
  bool keep_eq1 = false;

  Mode resolve(Mode fallback) const {
    if (mode.empty()) return fallback;
    return mode == "box" ? Mode::Box : Mode::Exact;
  }
};

void add_mode(CLI::App* cmd, ModeOpt& m) {
  cmd->add_option("--mode", m.mode, "exact or box (default: the benchmark's mode, else exact)")
      ->check(CLI::IsMember({"exact", "box"}));
  cmd->add_flag("--box-keep-eq1", m.keep_eq1, "box mode keeps the alpha/theta equalities");
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  if (path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void print_qubit(const QubitValue& q) {
  std::printf("  q%d state %d%s%s: alpha = %.6f%+.6fi, beta = %.6f%+.6fi\n", q.qubit, q.state,
              q.branch.empty() ? "" : " branch ", q.branch.c_str(), q.alpha.real(), q.alpha.imag(), q.beta.real(),
              q.beta.imag());
}

void print_report(const std::string& label, const VerifyReport& r, const Loaded& l) {
  std::printf("%s: %s (%s mode, delta %g, %.1f ms)\n", label.c_str(), outcome_name(r.outcome), mode_name(r.mode),
              r.delta, r.wall_ms);
  if (!r.message.empty()) std::printf("  %s\n", r.message.c_str());
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    std::printf("counterexample (interval midpoints):\n");
    for (const auto& q : c.inputs) print_qubit(q);
    for (const auto& [n, v] : c.params) std::printf("  param %s = %.9g\n", n.c_str(), v);
    for (const auto& q : c.finals) print_qubit(q);
    try {
      std::printf("simulator replay: spec violated by %.3g\n", replay(l.program, l.spec.formula, c));
    } catch (const std::exception& e) {
      std::printf("simulator replay unavailable: %s\n", e.what());
    }
  }
}

SolverConfig solver_config(double delta, double eps, const std::string& solver, const std::string& profile,
                           double timeout, const std::vector<std::string>& flags) {
  SolverConfig cfg;
  cfg.delta = delta;
  cfg.eps = eps;
  cfg.solver_path = solver;
  cfg.profile = profile == "smtlib" ? SolverProfile::SmtLib : SolverProfile::DReal;
  cfg.timeout_s = timeout;
  cfg.extra_flags = flags;
  return cfg;
}

std::string format_amp(Amp a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.6f%+.6fi", a.real(), a.imag());
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qvsmt: symbolic verification of quantum circuits with a delta-complete SMT solver"};
  app.set_version_flag("--version", "qvsmt 0.1.0");
  app.require_subcommand(1);

  // verify
  Source vsrc;
  ModeOpt vmode;
  double delta = 1e-4, eps = 1e-3, timeout = 600.0;
  std::string solver, profile = "dreal", json_path, dump_path;
  std::vector<std::string> solver_flags;
  auto* verify_cmd = app.add_subcommand("verify", "check a circuit against its specification");
  add_source(verify_cmd, vsrc);
  add_mode(verify_cmd, vmode);
  auto add_solver_opts = [&](CLI::App* cmd) {
    cmd->add_option("--delta", delta, "solver precision")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", eps, "margin of negated spec atoms")->check(CLI::PositiveNumber);
    cmd->add_option("--solver", solver, "solver executable (default: bundled qsolve)");
    cmd->add_option("--profile", profile, "solver output format")->check(CLI::IsMember({"dreal", "smtlib"}));
    cmd->add_option("--solver-flag", solver_flags, "extra solver argument (repeatable)");
    cmd->add_option("--timeout", timeout, "seconds per solver call");
    cmd->add_option("--json", json_path, "write the JSON report here ('-' for stdout)");
  };
  add_solver_opts(verify_cmd);
  verify_cmd->add_option("--dump-smt", dump_path, "also write the SMT-LIB2 query");

  // simulate
  Source ssrc;
  std::vector<std::string> param_defs;
  std::string input_bits;
  bool show_states = false;
  auto* sim_cmd = app.add_subcommand("simulate", "run the dense simulator and check the spec by enumeration");
  add_source(sim_cmd, ssrc);
  sim_cmd->add_option("--param", param_defs, "name=value (repeatable)");
  sim_cmd->add_option("--input", input_bits, "basis input as a bit string, qubit 0 first");
  sim_cmd->add_flag("--states", show_states, "print the final state of every branch");

  // dump-smt
  Source dsrc;
  ModeOpt dmode;
  std::string out_path;
  double deps = 1e-3;
  auto* dump_cmd = app.add_subcommand("dump-smt", "write the SMT-LIB2 query without solving");
  add_source(dump_cmd, dsrc);
  add_mode(dump_cmd, dmode);
  dump_cmd->add_option("--out,--dump-smt", out_path, "output file (default stdout)");
  dump_cmd->add_option("--eps", deps, "margin of negated spec atoms")->check(CLI::PositiveNumber);

  // bench
  std::vector<std::string> cases = {"tp", "toffoli", "gdo:3", "gdo:5", "qft:2", "qft:3"};
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  ModeOpt bmode;
  auto* bench_cmd = app.add_subcommand("bench", "verify a list of benchmarks in parallel");
  bench_cmd->add_option("--case", cases, "name[:size][/mutation] (repeatable)");
  bench_cmd->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
  add_mode(bench_cmd, bmode);
  add_solver_opts(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (*verify_cmd) {
      Loaded l = load(vsrc);
      SolverConfig cfg = solver_config(delta, eps, solver, profile, timeout, solver_flags);
      cfg.mode = vmode.resolve(l.mode);
      cfg.box_keep_eq1 = vmode.keep_eq1;
      cfg.dump_smt = dump_path;
      VerifyReport r = verify(l.program, l.spec, cfg);
      if (json_path != "-") print_report(l.label, r, l);
      write_json(json_path, to_json(r));
      return exit_code(r.outcome);
    }

    if (*dump_cmd) {
      Loaded l = load(dsrc);
      EncodeOptions eo;
      eo.mode = dmode.resolve(l.mode);
      eo.box_keep_eq1 = dmode.keep_eq1;
      Query q = assemble_query(l.program, l.spec.formula, eo, deps);
      const std::string smt = emit(q.script(), eo.smt);
      if (out_path.empty()) {
        std::fputs(smt.c_str(), stdout);
      } else {
        std::ofstream(out_path) << smt;
      }
      return 0;
    }

    if (*sim_cmd) {
      Loaded l = load(ssrc);
      SimOptions so;
      for (const auto& d : param_defs) {
        const auto eq = d.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--param expects name=value");
        so.params[param_var(d.substr(0, eq))] = std::stod(d.substr(eq + 1));
      }
      std::vector<std::vector<Amp>> inputs;
      if (!input_bits.empty()) {
        if (static_cast<int>(input_bits.size()) != l.program.n_qubits)
          throw CLI::ValidationError("--input needs one bit per qubit");
        std::vector<std::pair<Amp, Amp>> qs;
        for (char c : input_bits) qs.emplace_back(c == '1' ? 0.0 : 1.0, c == '1' ? 1.0 : 0.0);
        inputs.push_back(product_state(qs));
      } else {
        inputs = enumerate_inputs(l.program);
      }
      EnumResult er = enumerate_verify(l.program, l.spec.formula, inputs, so);
      std::printf("%s: %zu input(s), spec %s (worst violation %.3g)\n", l.label.c_str(), er.cases,
                  er.pass ? "holds" : "fails", er.worst);
      if (er.failing_input) std::printf("  first failing input: #%zu\n", *er.failing_input);
      if (show_states) {
        SimView view(l.program, inputs[er.failing_input.value_or(0)], so);
        for (const auto& b : view.branch_labels()) {
          const auto& s = view.state(view.state_count() - 1, b);
          std::printf("branch '%s' p = %.6f\n", b.c_str(), view.probability(b));
          for (std::size_t i = 0; i < s.amps.size(); ++i)
            if (std::abs(s.amps[i]) > 1e-12) std::printf("  |%zu> %s\n", i, format_amp(s.amps[i]).c_str());
        }
      }
      return er.pass ? 0 : 1;
    }

    if (*bench_cmd) {
      struct Row {
        std::string label;
        VerifyReport report;
        std::string error;
      };
      std::vector<Row> rows(cases.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
          std::string c = cases[i], mut;
          int size = 0;
          if (auto slash = c.find('/'); slash != std::string::npos) {
            mut = c.substr(slash + 1);
            c = c.substr(0, slash);
          }
          if (auto colon = c.find(':'); colon != std::string::npos) {
            size = std::stoi(c.substr(colon + 1));
            c = c.substr(0, colon);
          }
          rows[i].label = cases[i];
          try {
            Loaded l = load(Source{c, size, mut, "", ""});
            SolverConfig cfg = solver_config(delta, eps, solver, profile, timeout, solver_flags);
            cfg.mode = bmode.resolve(l.mode);
            cfg.box_keep_eq1 = bmode.keep_eq1;
            rows[i].report = verify(l.program, l.spec, cfg);
          } catch (const std::exception& e) {
            rows[i].error = e.what();
          }
        }
      };
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < std::min<std::size_t>(jobs, cases.size()); ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      nlohmann::json all = nlohmann::json::array();
      int code = 0;
      for (const auto& r : rows) {
        if (!r.error.empty()) {
          std::printf("%-20s error: %s\n", r.label.c_str(), r.error.c_str());
          all.push_back({{"case", r.label}, {"verdict", "error"}, {"message", r.error}});
          code = kExitError;
          continue;
        }
        std::printf("%-20s %-20s %-6s %10.1f ms\n", r.label.c_str(), outcome_name(r.report.outcome),
                    mode_name(r.report.mode), r.report.wall_ms);
        auto j = to_json(r.report);
        j["case"] = r.label;
        all.push_back(j);
        code = std::max(code, exit_code(r.report.outcome));
      }
      write_json(json_path, all);
      return code;
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "qvsmt: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qvsmt: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
