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


#include "qvsmt/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qvsmt/smtlib.hpp"

#ifndef QVSMT_DEFAULT_SOLVER
#define QVSMT_DEFAULT_SOLVER "dreal"
#endif

namespace qvsmt {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct ProcessResult {
  int status = -1;  // exit code, or -1 when killed or not started
  bool timed_out = false;
  std::string out;
  std::string err;
};

// fork/exec with both output pipes drained through poll; SIGKILL at the deadline.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_s) {
  ProcessResult r;
  int out_fd[2], err_fd[2];
  if (pipe(out_fd) != 0) throw SolverError("pipe failed");
  if (pipe(err_fd) != 0) {
    close(out_fd[0]);
    close(out_fd[1]);
    throw SolverError("pipe failed");
  }
  pid_t pid = fork();
  if (pid < 0) throw SolverError("fork failed");
  if (pid == 0) {
    dup2(out_fd[1], STDOUT_FILENO);
    dup2(err_fd[1], STDERR_FILENO);
    close(out_fd[0]);
    close(err_fd[0]);
    close(out_fd[1]);
    close(err_fd[1]);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(out_fd[1]);
  close(err_fd[1]);
  const auto t0 = Clock::now();
  pollfd fds[2] = {{out_fd[0], POLLIN, 0}, {err_fd[0], POLLIN, 0}};
  int open_fds = 2;
  char buf[4096];
  while (open_fds > 0) {
    int wait_ms = -1;
    if (timeout_s > 0) {
      const double left = timeout_s * 1000.0 - ms_since(t0);
      if (left <= 0) {
        kill(pid, SIGKILL);
        r.timed_out = true;
        break;
      }
      wait_ms = static_cast<int>(std::min(left, 1000.0)) + 1;
    }
    if (poll(fds, 2, wait_ms) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (auto& f : fds) {
      if (f.fd < 0 || !(f.revents & (POLLIN | POLLHUP | POLLERR))) continue;
      ssize_t n = read(f.fd, buf, sizeof(buf));
      if (n > 0) {
        (f.fd == out_fd[0] ? r.out : r.err).append(buf, static_cast<std::size_t>(n));
      } else {
        close(f.fd);
        f.fd = -1;
        --open_fds;
      }
    }
  }
  for (auto& f : fds)
    if (f.fd >= 0) close(f.fd);
  int status = 0;
  waitpid(pid, &status, 0);
  if (!r.timed_out && WIFEXITED(status)) r.status = WEXITSTATUS(status);
  return r;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (trim(s.substr(used)) != "") throw std::invalid_argument(s);
  return v;
}

// `name : [lo, hi]` or `name : v`
bool parse_model_line(const std::string& line, std::pair<std::string, Interval>& out) {
  const auto colon = line.find(" : ");
  if (colon == std::string::npos) return false;
  out.first = trim(line.substr(0, colon));
  std::string rest = trim(line.substr(colon + 3));
  try {
    if (!rest.empty() && rest.front() == '[') {
      const auto comma = rest.find(',');
      const auto close = rest.rfind(']');
      if (comma == std::string::npos || close == std::string::npos) return false;
      out.second = Interval(parse_double(rest.substr(1, comma - 1)), parse_double(rest.substr(comma + 1, close - comma - 1)));
    } else {
      out.second = Interval(parse_double(rest));
    }
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

double model_number(const SExpr& e) {
  if (e.is_atom) {
    double v;
    if (!parse_number(e.atom, v)) throw std::invalid_argument("not a number: " + e.atom);
    return v;
  }
  if (e.list.size() == 2 && e.list[0].is_atom && e.list[0].atom == "-") return -model_number(e.list[1]);
  if (e.list.size() == 3 && e.list[0].is_atom && e.list[0].atom == "/")
    return model_number(e.list[1]) / model_number(e.list[2]);
  throw std::invalid_argument("unsupported model value " + to_string(e));
}

std::string script_text(const std::string& smt, SolverProfile profile) {
  if (profile == SolverProfile::DReal) return smt;
  std::string s = smt;
  const auto at = s.rfind("(exit)");
  s.insert(at == std::string::npos ? s.size() : at, "(get-model)\n");
  return s;
}

}  // namespace

std::string default_solver_path() {
  if (const char* env = std::getenv("QVSMT_SOLVER"); env && *env) return env;
  if (std::filesystem::exists(QVSMT_DEFAULT_SOLVER)) return QVSMT_DEFAULT_SOLVER;
  return "dreal";
}

bool solver_available(const std::string& path) {
  try {
    return run_process({path, "--version"}, 10.0).status == 0;
  } catch (const SolverError&) {
    return false;
  }
}

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Unsat: return "unsat";
    case VerdictKind::DeltaSat: return "delta-sat";
    case VerdictKind::Timeout: return "timeout";
    case VerdictKind::Unknown: return "unknown";
    case VerdictKind::SolverError: return "error";
  }
  return "?";
}

std::optional<Interval> Verdict::value(const std::string& name) const {
  for (const auto& [n, iv] : model)
    if (n == name) return iv;
  return std::nullopt;
}

Verdict parse_solver_output(const std::string& out, SolverProfile profile) {
  Verdict v;
  v.text = out;
  std::istringstream in(out);
  std::string line, first;
  while (std::getline(in, line))
    if (!(first = trim(line)).empty()) break;
  if (first == "unsat") {
    v.kind = VerdictKind::Unsat;
    return v;
  }
  if (first == "unknown") {
    v.kind = VerdictKind::Unknown;
    return v;
  }
  if (profile == SolverProfile::DReal && first.rfind("delta-sat", 0) == 0) {
    v.kind = VerdictKind::DeltaSat;
    std::pair<std::string, Interval> m;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      if (!parse_model_line(line, m)) {
        v.kind = VerdictKind::SolverError;
        v.text = "unparseable model line: " + line;
        return v;
      }
      v.model.push_back(m);
    }
    return v;
  }
  if (profile == SolverProfile::SmtLib && first == "sat") {
    v.kind = VerdictKind::DeltaSat;
    std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
      for (const auto& top : parse_sexprs(rest)) {
        const auto& defs = (!top.is_atom && !top.list.empty() && top.list[0].is_atom && top.list[0].atom == "model")
                               ? std::vector<SExpr>(top.list.begin() + 1, top.list.end())
                               : top.list;
        for (const auto& d : defs) {
          if (d.is_atom || d.list.size() != 5 || d.list[0].atom != "define-fun") continue;
          const double x = model_number(d.list[4]);
          v.model.emplace_back(d.list[1].atom, Interval(x));
        }
      }
    } catch (const std::exception& e) {
      v.kind = VerdictKind::SolverError;
      v.text = std::string("unparseable model: ") + e.what();
    }
    return v;
  }
  v.kind = VerdictKind::SolverError;
  v.text = "unexpected solver output: " + (first.empty() ? std::string("<empty>") : first);
  return v;
}

Verdict run_solver(const std::string& smt, const SolverConfig& cfg) {
  if (!(cfg.delta > 0)) throw std::invalid_argument("delta must be positive");
  const std::string solver = cfg.solver_path.empty() ? default_solver_path() : cfg.solver_path;
  std::string tmpl = (std::filesystem::temp_directory_path() / "qvsmt-XXXXXX.smt2").string();
  int fd = mkstemps(tmpl.data(), 5);
  if (fd < 0) throw SolverError("cannot create a temp file");
  const std::string text = script_text(smt, cfg.profile);
  {
    FILE* f = fdopen(fd, "w");
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }
  std::vector<std::string> argv = {solver};
  if (cfg.profile == SolverProfile::DReal) {
    char d[64];
    std::snprintf(d, sizeof(d), "%.17g", cfg.delta);
    argv.insert(argv.end(), {"--precision", d, "--model"});
  }
  argv.insert(argv.end(), cfg.extra_flags.begin(), cfg.extra_flags.end());
  argv.push_back(tmpl);

  const auto t0 = Clock::now();
  ProcessResult pr;
  try {
    pr = run_process(argv, cfg.timeout_s);
  } catch (...) {
    std::filesystem::remove(tmpl);
    throw;
  }
  std::filesystem::remove(tmpl);
  Verdict v;
  if (pr.timed_out) {
    v.kind = VerdictKind::Timeout;
    v.text = "no answer within " + std::to_string(cfg.timeout_s) + " s";
  } else if (pr.status == 127) {
    v.kind = VerdictKind::SolverError;
    v.text = "cannot execute " + solver;
  } else {
    v = parse_solver_output(pr.out, cfg.profile);
    // z3-style solvers exit nonzero on errors; dReal and qsolve exit 0 on answers
    if (pr.status != 0 && v.kind != VerdictKind::SolverError) {
      v.kind = VerdictKind::SolverError;
      v.text = "solver exited with " + std::to_string(pr.status) + ": " + trim(pr.err);
    } else if (v.kind == VerdictKind::SolverError && !trim(pr.err).empty()) {
      v.text += " (" + trim(pr.err) + ")";
    }
  }
  v.wall_ms = ms_since(t0);
  return v;
}

Verdict run(const Constraint& c, const SolverConfig& cfg) {
  std::set<std::string> vars;
  collect_vars(c, vars);
  SmtScript s;
  s.logic = "QF_NRA";
  s.decls.assign(vars.begin(), vars.end());
  std::vector<Constraint> parts;
  if (c.kind() == CKind::And) {
    parts = c.kids();
  } else {
    parts.push_back(c);
  }
  s.sections.push_back(SmtSection{"query", parts});
  return run_solver(emit(s), cfg);
}

// --- counterexamples ---------------------------------------------------------

namespace {

QubitValue block_value(const QubitBlock& b, const Valuation& val) {
  QubitValue q;
  q.state = b.state;
  q.qubit = b.qubit;
  q.branch = b.branch;
  try {
    q.alpha = evaluate(b.alpha, val);
    q.beta = evaluate(b.beta, val);
  } catch (const EvalError& e) {
    throw MissingSymbol(e.what());
  }
  q.residual = std::abs(std::norm(q.alpha) + std::norm(q.beta) - 1.0);
  return q;
}

}  // namespace

Counterexample extract_counterexample(const Verdict& v, const EncodingResult& enc, double delta) {
  if (v.kind != VerdictKind::DeltaSat) throw std::invalid_argument("counterexamples need a delta-sat verdict");
  Valuation val;
  for (const auto& [name, iv] : v.model) val[name] = iv.mid();
  for (const auto& d : enc.decls)
    if (!val.count(d)) throw MissingSymbol("model has no value for " + d);
  Counterexample c;
  const Snapshot& s0 = enc.table.snapshot(0, "");
  for (const auto& g : s0.groups) {
    if (g.is_block) {
      c.inputs.push_back(block_value(g.block, val));
      c.max_residual = std::max(c.max_residual, c.inputs.back().residual);
    } else {
      std::vector<std::complex<double>> amps;
      for (const auto& a : g.vec.amps) amps.push_back(evaluate(a, val));
      c.input_vectors.emplace_back(g.qubits, std::move(amps));
    }
  }
  const int last = enc.table.state_count() - 1;
  for (const auto& label : enc.table.branch_labels()) {
    for (const auto& g : enc.table.snapshot(last, label).groups)
      if (g.is_block) c.finals.push_back(block_value(g.block, val));
  }
  for (const auto& [name, x] : val)
    if (name.rfind("param_", 0) == 0) c.params[name.substr(6)] = x;
  c.outside_hilbert = c.max_residual > 10.0 * delta;
  return c;
}

std::vector<Amp> Counterexample::input_state(const ProgramModel& p) const {
  std::vector<std::pair<int, std::vector<Amp>>> parts;
  for (const auto& q : inputs) {
    const double n = std::sqrt(std::norm(q.alpha) + std::norm(q.beta));
    if (n == 0.0) throw std::invalid_argument("zero input qubit in counterexample");
    parts.push_back({q.qubit, {q.alpha / n, q.beta / n}});
  }
  for (const auto& [qs, amps] : input_vectors) {
    double n = 0.0;
    for (const auto& a : amps) n += std::norm(a);
    n = std::sqrt(n);
    std::vector<Amp> v;
    for (const auto& a : amps) v.push_back(a / n);
    parts.push_back({qs[0], std::move(v)});
  }
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Amp> out{1.0};
  for (const auto& [q, v] : parts) {
    std::vector<Amp> next(out.size() * v.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) next[i * v.size() + j] = out[i] * v[j];
    out = std::move(next);
  }
  if (out.size() != (std::size_t{1} << p.n_qubits)) throw std::invalid_argument("counterexample does not cover every qubit");
  return out;
}

Valuation Counterexample::param_valuation() const {
  Valuation v;
  for (const auto& [n, x] : params) v[param_var(n)] = x;
  return v;
}

double replay(const ProgramModel& p, const SpecFormula& f, const Counterexample& c) {
  SimOptions o;
  o.parallel = false;
  o.params = c.param_valuation();
  SimView view(p, c.input_state(p), o);
  return violation(expand_branches(f, view.branch_labels()), view);
}

// --- verification ------------------------------------------------------------

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Verified: return "verified";
    case Outcome::Refuted: return "refuted";
    case Outcome::SpuriousCandidate: return "spurious-candidate";
    case Outcome::StructuralViolation: return "structural-violation";
    case Outcome::Timeout: return "timeout";
    case Outcome::Unknown: return "unknown";
    case Outcome::Error: return "error";
  }
  return "?";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Verified: return 0;
    case Outcome::Refuted:
    case Outcome::StructuralViolation: return 1;
    default: return 2;
  }
}

namespace {

Attempt attempt(const ProgramModel& p, const Spec& spec, const SolverConfig& cfg, Mode mode, const std::string& dump) {
  EncodeOptions eo;
  eo.mode = mode;
  eo.box_keep_eq1 = cfg.box_keep_eq1;
  Query q = assemble_query(p, spec.formula, eo, cfg.eps);
  const std::string smt = emit(q.script(), eo.smt);
  if (!dump.empty()) {
    std::ofstream out(dump);
    out << smt;
  }
  Attempt a;
  a.mode = mode;
  a.verdict = run_solver(smt, cfg);
  if (a.verdict.kind == VerdictKind::DeltaSat) a.counterexample = extract_counterexample(a.verdict, q.enc, cfg.delta);
  return a;
}

Outcome outcome_of(const Attempt& a) {
  switch (a.verdict.kind) {
    case VerdictKind::Unsat: return Outcome::Verified;
    case VerdictKind::DeltaSat:
      return a.mode == Mode::Box && a.counterexample->outside_hilbert ? Outcome::SpuriousCandidate : Outcome::Refuted;
    case VerdictKind::Timeout: return Outcome::Timeout;
    case VerdictKind::Unknown: return Outcome::Unknown;
    case VerdictKind::SolverError: return Outcome::Error;
  }
  return Outcome::Error;
}

}  // namespace

VerifyReport verify(const ProgramModel& p, const Spec& spec, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  VerifyReport r;
  r.delta = cfg.delta;
  r.mode = cfg.mode;
  if (auto sv = check_structural(spec.rules, p)) {
    r.outcome = Outcome::StructuralViolation;
    r.structural = sv;
    r.message = sv->message;
    r.wall_ms = ms_since(t0);
    return r;
  }
  Attempt a = attempt(p, spec, cfg, cfg.mode, cfg.dump_smt);
  r.attempts.push_back(a);
  Outcome o = outcome_of(a);
  if (o == Outcome::SpuriousCandidate) {
    r.message = "box witness outside the Hilbert space; re-running without the over-approximation";
    std::string dump = cfg.dump_smt.empty() ? "" : cfg.dump_smt + ".exact";
    a = attempt(p, spec, cfg, Mode::Exact, dump);
    r.attempts.push_back(a);
    o = outcome_of(a);
  }
  r.outcome = o;
  r.mode = a.mode;
  r.counterexample = a.counterexample;
  if (o == Outcome::Error || o == Outcome::Timeout || o == Outcome::Unknown) r.message = a.verdict.text;
  r.wall_ms = ms_since(t0);
  return r;
}

// --- JSON ----------------------------------------------------------------------

namespace {

nlohmann::json qubit_json(const QubitValue& q) {
  return {{"state", q.state},
          {"qubit", q.qubit},
          {"branch", q.branch},
          {"alpha", {q.alpha.real(), q.alpha.imag()}},
          {"beta", {q.beta.real(), q.beta.imag()}},
          {"residual", q.residual}};
}

}  // namespace

nlohmann::json to_json(const Counterexample& c) {
  nlohmann::json j;
  j["inputs"] = nlohmann::json::array();
  for (const auto& q : c.inputs) j["inputs"].push_back(qubit_json(q));
  j["input_vectors"] = nlohmann::json::array();
  for (const auto& [qs, amps] : c.input_vectors) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : amps) a.push_back({x.real(), x.imag()});
    j["input_vectors"].push_back({{"qubits", qs}, {"amplitudes", a}});
  }
  j["finals"] = nlohmann::json::array();
  for (const auto& q : c.finals) j["finals"].push_back(qubit_json(q));
  j["params"] = c.params;
  j["midpoint"] = c.midpoint;
  j["max_residual"] = c.max_residual;
  j["outside_hilbert"] = c.outside_hilbert;
  return j;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json j;
  j["verdict"] = outcome_name(r.outcome);
  j["delta"] = r.delta;
  j["mode"] = mode_name(r.mode);
  j["wall_time_ms"] = r.wall_ms;
  if (r.counterexample) j["counterexample"] = to_json(*r.counterexample);
  j["attempts"] = nlohmann::json::array();
  for (const auto& a : r.attempts)
    j["attempts"].push_back(
        {{"mode", mode_name(a.mode)}, {"solver_verdict", verdict_name(a.verdict.kind)}, {"wall_time_ms", a.verdict.wall_ms}});
  if (r.structural) j["structural"] = {{"rule", r.structural->rule}, {"op_index", r.structural->op_index}};
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

}  // namespace qvsmt
