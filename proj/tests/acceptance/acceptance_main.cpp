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

// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "qvsmt/benchmarks.hpp"
#include "qvsmt/sim.hpp"
#include "qvsmt/solver.hpp"

namespace {

using namespace qvsmt;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Proc {
  int status = -1;
  std::string out;
};

Proc sh(const std::string& cmd) {
  Proc p;
  FILE* f = popen((cmd + " 2>&1").c_str(), "r");
  if (!f) return p;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, f)) p.out.append(buf, n);
  int st = pclose(f);
  p.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

SolverConfig config(double delta = 1e-4) {
  SolverConfig c;
  c.solver_path = QVSMT_QSOLVE;
  c.delta = delta;
  c.timeout_s = 600;
  return c;
}

struct Case {
  std::string name;
  int size = 0;
  std::string mutation;
};

std::string label(const Case& c) {
  std::string s = c.name;
  if (c.size) s += "-" + std::to_string(c.size);
  if (!c.mutation.empty()) s += "/" + c.mutation;
  return s;
}

VerifyReport verify_case(const Case& c, double delta, std::optional<Mode> mode = std::nullopt) {
  Benchmark b = generate(c.name, c.size, c.mutation);
  SolverConfig cfg = config(delta);
  cfg.mode = mode.value_or(b.mode);
  return verify(b.program, b.spec, cfg);
}

const std::vector<Case> kVerified = {{"tp"}, {"toffoli"}, {"gdo", 3}, {"gdo", 5}, {"qft", 2}, {"qft", 3}};
const std::vector<Case> kMutants = {{"tp", 0, "drop-cz"}, {"tp", 0, "drop-cx"}, {"toffoli", 0, "drop-x"},
                                    {"gdo", 3, "sign-flip"}};

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " C" << id << " " << what << " (" << detail << ")" << std::endl;
  if (!ok) ++failures;
}

void c1_golden() {
  auto t0 = Clock::now();
  std::string src = QVSMT_SOURCE_DIR;
  Proc p = sh("python3 " + src + "/tests/golden/golden_diff.py " + src + "/tests/golden/tp_exact.map --qvsmt " +
              QVSMT_CLI + " dump-smt --bench tp --mode exact");
  double s = seconds_since(t0);
  std::string last = p.out.substr(p.out.rfind('\n', p.out.size() - 2) + 1);
  if (!last.empty() && last.back() == '\n') last.pop_back();
  report(1, p.status == 0 && s < 1.0, "golden encoding", last + ", " + std::to_string(s) + " s");
  if (p.status != 0) std::cout << p.out;
}

std::string c2_verdicts(double delta, bool& ok) {
  std::ostringstream os;
  for (const auto& c : kVerified) {
    VerifyReport r = verify_case(c, delta);
    bool good = r.outcome == Outcome::Verified;
    ok &= good;
    os << label(c) << "=" << outcome_name(r.outcome) << " ";
  }
  std::string s = os.str();
  s.pop_back();
  return s;
}

void c3_mutants() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : kMutants) {
    Benchmark b = generate(c.name, c.size, c.mutation);
    VerifyReport r = verify_case(c, 1e-4);
    double margin = r.counterexample ? replay(b.program, b.spec.formula, *r.counterexample) : 0.0;
    ok &= r.outcome == Outcome::Refuted && margin > 1e-3;
    os << label(c) << "=" << outcome_name(r.outcome) << " margin " << margin << "; ";
  }
  report(3, ok, "refuted mutants replay", os.str());
}

// Random circuit on up to 3 qubits, at most 6 gates, no measurement.
std::vector<StateOp> random_ops(std::mt19937_64& rng, int n) {
  auto pick = [&](int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng); };
  std::uniform_real_distribution<double> ang(-3.5, 3.5);
  std::vector<StateOp> ops;
  int count = 1 + pick(6);
  for (int i = 0; i < count; ++i) {
    int q = pick(n), t = (q + 1 + (n > 1 ? pick(n - 1) : 0)) % n;
    int kinds = n >= 3 ? 10 : n == 2 ? 9 : 6;
    switch (pick(kinds)) {
      case 0: ops.push_back(StateOp::apply(GateSpec::h(q))); break;
      case 1: ops.push_back(StateOp::apply(GateSpec::x(q))); break;
      case 2: ops.push_back(StateOp::apply(GateSpec::z(q))); break;
      case 3: ops.push_back(StateOp::apply(GateSpec::rx(q, ang(rng)))); break;
      case 4: ops.push_back(StateOp::apply(GateSpec::rz(q, ang(rng)))); break;
      case 5: ops.push_back(StateOp::apply(GateSpec::rk(q, RealTerm(1.0 + pick(4))))); break;
      case 6: ops.push_back(StateOp::apply(GateSpec::cx(q, t))); break;
      case 7: ops.push_back(StateOp::apply(GateSpec::cz(q, t))); break;
      case 8: ops.push_back(StateOp::apply(GateSpec::swap(q, t))); break;
      default: ops.push_back(StateOp::apply(GateSpec::controlled(GateSpec::x(3 - q - t), {q, t}))); break;
    }
  }
  return ops;
}

void c4_oracle() {
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> g;
  const int kCircuits = 200;
  int sat = 0, unsat = 0, errors = 0;
  std::string first_bad;
  for (int i = 0; i < kCircuits; ++i) {
    int n = 1 + static_cast<int>(rng() % 3);
    std::vector<InitSpec> inits;
    std::vector<std::pair<Amp, Amp>> pairs;
    for (int q = 0; q < n; ++q) {
      Amp a{g(rng), g(rng)}, b{g(rng), g(rng)};
      double nr = std::sqrt(std::norm(a) + std::norm(b));
      auto [a2, b2] = strip_phase(a / nr, b / nr);
      inits.push_back(InitSpec::concrete(q, a2, b2));
      pairs.emplace_back(a2, b2);
    }
    ProgramModel p = build_program(n, random_ops(rng, n), {}, inits);
    RunResult sim = run_concrete(p, product_state(pairs), "", {});
    const auto& out = sim.states.back().amps;

    EncodingResult enc = encode(p, {});
    int last = p.state_count() - 1;
    std::vector<Constraint> pins;
    std::vector<RealTerm> comps;
    for (std::size_t k = 0; k < out.size(); ++k) {
      ComplexTerm t = enc.table.amplitude(last, k, "");
      comps.push_back(t.re);
      comps.push_back(t.im);
    }
    for (std::size_t k = 0; k < comps.size(); ++k) {
      double v = k % 2 ? out[k / 2].imag() : out[k / 2].real();
      pins.push_back(Constraint::eq(comps[k], v));
    }
    Constraint base = enc.formula();
    Verdict v1 = run(Constraint::conj({base, Constraint::conj(pins)}), config());

    std::size_t j = rng() % comps.size();
    double vj = j % 2 ? out[j / 2].imag() : out[j / 2].real();
    pins[j] = Constraint::eq(comps[j], vj + 1e-2);
    Verdict v2 = run(Constraint::conj({base, Constraint::conj(pins)}), config());

    sat += v1.kind == VerdictKind::DeltaSat;
    unsat += v2.kind == VerdictKind::Unsat;
    if (v1.kind == VerdictKind::SolverError || v2.kind == VerdictKind::SolverError) ++errors;
    if (first_bad.empty() && (v1.kind != VerdictKind::DeltaSat || v2.kind != VerdictKind::Unsat))
      first_bad = "; first mismatch #" + std::to_string(i) + ": " + to_qpm(p) + " -> " + verdict_name(v1.kind) + "/" +
                  verdict_name(v2.kind);
  }
  report(4, sat == kCircuits && unsat == kCircuits, "oracle equivalence",
         std::to_string(kCircuits) + " circuits, pinned delta-sat " + std::to_string(sat) + ", perturbed unsat " +
             std::to_string(unsat) + (errors ? ", solver errors " + std::to_string(errors) : "") + first_bad);
}

void c5_box_soundness() {
  std::vector<Case> corpus;
  for (const auto& name : benchmark_names()) {
    corpus.push_back({name, default_size(name)});
    for (const auto& m : mutations_for(name)) corpus.push_back({name, default_size(name), m});
  }
  corpus.push_back({"gdo", 5});
  corpus.push_back({"qft", 2});
  bool ok = true;
  int spurious = 0;
  std::ostringstream bad;
  for (const auto& c : corpus) {
    VerifyReport box = verify_case(c, 1e-4, Mode::Box);
    VerifyReport exact = verify_case(c, 1e-4, Mode::Exact);
    if (box.outcome == Outcome::Verified && exact.outcome == Outcome::Refuted) {
      ok = false;
      bad << " unsound on " << label(c);
    }
    bool had_spurious = false;
    for (const auto& a : box.attempts)
      if (a.mode == Mode::Box && a.counterexample && a.counterexample->outside_hilbert) had_spurious = true;
    if (had_spurious) {
      ++spurious;
      bool definitive = box.mode == Mode::Exact &&
                        (box.outcome == Outcome::Verified || box.outcome == Outcome::Refuted);
      if (!definitive) {
        ok = false;
        bad << " re-run of " << label(c) << " ended " << outcome_name(box.outcome);
      }
    }
  }
  report(5, ok, "box over-approximation soundness",
         std::to_string(corpus.size()) + " cases, " + std::to_string(spurious) + " spurious box witnesses re-run" +
             bad.str());
}

void c6_delta() {
  bool ok = true;
  std::string base = c2_verdicts(1e-4, ok);
  std::ostringstream os;
  for (double d : {1e-6, 1e-8}) {
    bool dummy = true;
    std::string v = c2_verdicts(d, dummy);
    if (v != base) {
      ok = false;
      os << " delta " << d << ": " << v;
    }
  }
  report(6, ok, "delta robustness", "verdicts identical at 1e-4, 1e-6, 1e-8" + os.str());
}

void c7_properties() {
  struct Suite {
    const char* bin;
    const char* filter;
  };
  const Suite suites[] = {
      {QVSMT_GATES_TEST, "Mapping.AgreesWithMatrixOnProductStates:Matrix.CatalogIsUnitary"},
      {QVSMT_ENCODER_TEST, "Tensor.AssociativeAndNormPreserving:ApplyMatrix.MatchesDenseOracle:"
                           "Encode.BranchCountIsTwoToTheMeasured"},
      {QVSMT_QPM_TEST, "BranchLabels.CountIsTwoToTheMeasured"},
      {QVSMT_SPEC_TEST, "Negate.ExactWhenEpsIsZero:Negate.MarginSoundness"},
  };
  bool ok = true;
  int tests = 0;
  std::ostringstream bad;
  for (const auto& s : suites) {
    Proc p = sh(std::string(s.bin) + " --gtest_brief=1 --gtest_filter='" + s.filter + "'");
    ok &= p.status == 0;
    for (std::size_t at = p.out.find("[  PASSED  ] "); at != std::string::npos;) {
      tests += std::atoi(p.out.c_str() + at + 13);
      break;
    }
    if (p.status != 0) bad << " " << s.filter;
  }
  report(7, ok && tests == 8, "unit property suites", std::to_string(tests) + " property tests, >= 100 cases each" +
                                                          (bad.str().empty() ? "" : ", failed:" + bad.str()));
}

void c8_enumeration() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : std::vector<Case>{{"toffoli"}, {"add", 3}, {"qft", 3}}) {
    Benchmark b = generate(c.name, c.size);
    EnumResult r = enumerate_verify(b.program, b.spec.formula, enumerate_inputs(b.program));
    ok &= r.pass;
    os << label(c) << " " << r.cases << " inputs worst " << r.worst << "; ";
  }
  report(8, ok, "enumeration baseline", os.str());
}

}  // namespace

int main() {
  if (!solver_available(QVSMT_QSOLVE)) {
    std::cerr << "solver not available: " << QVSMT_QSOLVE << "\n";
    return 2;
  }
  auto t0 = Clock::now();
  c1_golden();
  bool ok2 = true;
  std::string v = c2_verdicts(1e-4, ok2);
  report(2, ok2, "verified verdicts at delta 1e-4", v);
  c3_mutants();
  c4_oracle();
  c5_box_soundness();
  c6_delta();
  c7_properties();
  c8_enumeration();
  std::cout << (8 - failures) << "/8 criteria passed in " << seconds_since(t0) << " s" << std::endl;
  return failures ? 1 : 0;
}
