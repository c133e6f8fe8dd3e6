// Acceptance checks A1-A10: one PASS/FAIL line each, exit status 1 if any
// fails.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "support.hpp"
#include "tmlab/containment.hpp"
#include "tmlab/enumerate.hpp"
#include "tmlab/format.hpp"
#include "tmlab/records.hpp"
#include "tmlab/rice.hpp"
#include "tmlab/store.hpp"
#include "tmlab/utm.hpp"

using namespace tmlab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const char* const kChampion5 = "1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA";

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<CorpusEntry> bundled() {
  auto out = load_corpus(fs::path(TMLAB_DATA_DIR) / "champions.tsv");
  auto more = load_corpus(fs::path(TMLAB_DATA_DIR) / "machines.tsv");
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

EnumerationReport leaves_of(std::size_t n) {
  EnumerationOptions o;
  o.keep_leaves = true;
  return enumerate(n, o);
}

Certificate shift_period(const Certificate& c, int delta) {
  Certificate out = c;
  if (auto* e = std::get_if<ExactCycle>(&out)) e->period = static_cast<std::uint64_t>(static_cast<std::int64_t>(e->period) + delta);
  if (auto* t = std::get_if<TranslatedCycle>(&out)) t->period = static_cast<std::uint64_t>(static_cast<std::int64_t>(t->period) + delta);
  return out;
}

void a1(Check& c) {
  const Machine m = parse_machine(kChampion5);
  auto t0 = Clock::now();
  const RunOutcome d = run_direct(m, {});
  const double td = seconds_since(t0);
  t0 = Clock::now();
  const RunOutcome a = run_accelerated(m, {});
  const double ta = seconds_since(t0);
  for (const RunOutcome* o : {&d, &a}) {
    c.expect(o->kind == OutcomeKind::Halted, "halted");
    c.expect(o->steps == 47'176'870, "steps 47176870");
    c.expect(o->marks == 4'098, "marks 4098");
  }
  c.expect(td < 60, "direct under 60 s");
  c.expect(ta < 5, "accelerated under 5 s");
  c.detail << "steps=" << to_decimal(d.steps) << " marks=" << d.marks << " direct " << td << " s, accelerated " << ta
           << " s";
}

void a2(Check& c) {
  const auto t0 = Clock::now();
  const auto r1 = enumerate(1);
  const auto r2 = enumerate(2);
  const auto r3 = enumerate(3);
  const tmtest::Best b2 = tmtest::brute_force_2();
  const tmtest::Best b3 = tmtest::brute_force_3();
  c.expect(r1.sigma == 1 && r1.s == 1 && r1.closed(), "n=1 is 1/1");
  c.expect(r2.sigma == b2.sigma && r2.s == b2.s, "n=2 matches brute force");
  c.expect(r3.sigma == b3.sigma && r3.s == b3.s, "n=3 matches brute force");
  c.expect(r2.sigma == 4 && r2.s == 6 && r2.closed(), "n=2 is 4/6 with no holdouts");
  c.expect(r3.sigma == 6 && r3.s == 21 && r3.closed(), "n=3 is 6/21 with no holdouts");
  const double t = seconds_since(t0);
  c.expect(t < 600, "under 10 minutes");
  c.detail << "sigma/s: n=1 " << r1.sigma << "/" << r1.s << ", n=2 " << r2.sigma << "/" << r2.s << ", n=3 " << r3.sigma
           << "/" << r3.s << " (brute force " << b2.sigma << "/" << b2.s << ", " << b3.sigma << "/" << b3.s << "), "
           << t << " s";
}

void a3(Check& c) {
  const RunLimits lim = RunLimits::steps(100'000);
  std::size_t n = 0;
  auto same = [&](const Machine& m, const InputWord& w) {
    const RunOutcome d = run_direct(m, w, lim);
    const RunOutcome a = run_accelerated(m, w, lim);
    c.expect(d.kind == a.kind && d.steps == a.steps && d.marks == a.marks && same_observable(d, a),
             serialize_machine(m) + " on '" + w.to_string() + "'");
    ++n;
  };
  for (const Leaf& l : leaves_of(2).leaves) same(l.machine, {});
  std::mt19937_64 rng(1001);
  for (int i = 0; i < 1000; ++i) {
    const Machine m = tmtest::random_machine(rng, 2 + rng() % 4, 0.05, 0.05);
    same(m, tmtest::random_word(rng, 6));
  }
  c.detail << n << " runs agree field-exactly";
}

void a4(Check& c) {
  std::size_t certs = 0, mutated = 0;
  for (std::size_t n : {2, 3}) {
    for (const Leaf& l : leaves_of(n).leaves) {
      if (l.verdict.kind != VerdictKind::NeverHalts) continue;
      std::uint64_t steps = 0, marks = 0;
      c.expect(!tmtest::quick_halts(l.machine, 10'000, steps, marks), "no NeverHalts on a halter: " + l.text);
      const Certificate& cert = *l.verdict.certificate;
      c.expect(validate_certificate(l.machine, {}, cert), "certificate replays: " + l.text);
      ++certs;
      if (std::holds_alternative<ExactCycle>(cert) || std::holds_alternative<TranslatedCycle>(cert)) {
        c.expect(!validate_certificate(l.machine, {}, shift_period(cert, +1)), "period+1 fails: " + l.text);
        const Certificate down = shift_period(cert, -1);
        const bool positive = std::visit(
            [](const auto& x) {
              if constexpr (requires { x.period; }) return x.period > 0;
              return false;
            },
            down);
        if (positive) c.expect(!validate_certificate(l.machine, {}, down), "period-1 fails: " + l.text);
        ++mutated;
      }
    }
  }
  c.detail << certs << " certificates replay, " << mutated << " period mutations rejected";
}

void a5(Check& c) {
  std::mt19937_64 rng(1005);
  std::size_t pairs = 0, harming = 0;
  while (pairs < 200) {
    const Machine t = tmtest::random_machine(rng, 1 + rng() % 5, 0.1, 0.1);
    const InputWord w = tmtest::random_word(rng, 5);
    // Known status: halts under simulation, or a certificate says it never does.
    const auto naive = tmtest::naive_run(t, w, 10'000);
    const bool halts = naive.halted;
    if (!halts && decide_all(t, w, RunLimits::steps(10'000)).kind != VerdictKind::NeverHalts) continue;
    const ContainedProgram p = make_halt_harm(t, w);
    const RunOutcome r = run_program(p, w, RunLimits::steps(20'000));
    c.expect(r.halted_via_gadget == halts, serialize_machine(t) + " on '" + w.to_string() + "'");
    if (halts) c.expect(r.steps == naive.steps + 2, "two gadget steps");
    ++pairs;
    harming += halts;
  }
  const ContainedProgram c5 = make_halt_harm(parse_machine(kChampion5), {});
  const RunOutcome r = run_program(c5, {}, RunLimits::steps(100'000'000));
  c.expect(r.halted_via_gadget, "champion-5 harms");
  c.expect(r.steps == 47'176'872, "champion-5 harms at 47176872");
  c.detail << pairs << " pairs (" << harming << " halting), champion-5 gadget halt at " << to_decimal(r.steps);
}

void a6(Check& c) {
  std::vector<Machine> corpus;
  const auto r3 = leaves_of(3);
  std::vector<const Leaf*> halters;
  for (const Leaf& l : r3.leaves) {
    if (l.verdict.kind == VerdictKind::Halts) halters.push_back(&l);
  }
  for (std::size_t i = 0; i < halters.size(); i += halters.size() / 50) corpus.push_back(halters[i]->machine);
  for (const char* t : {"1RZ---", "1RB1LB_1LA1RZ", "1RB1RZ_1LB0RC_1LC1LA", "1RB1LB_1LA0LC_1RZ1LD_1RD0RA"}) {
    corpus.push_back(parse_machine(t));
  }
  const RunLimits lim = RunLimits::steps(50'000'000);
  for (const Machine& m : corpus) {
    const RunOutcome d = run_direct(m, {}, lim);
    const RunOutcome u = run_via_utm(encode(m, {}), lim);
    const std::string name = serialize_machine(m);
    c.expect(u.halted() == d.halted(), "halting status " + name);
    if (!u.halted()) continue;
    const UtmRecovery rec = recover(u);
    c.expect(rec.halted && rec.steps == d.steps && rec.marks == d.marks, "steps and marks " + name);
    c.expect(same_recovery(rec, recovery_of(d)), "final tape " + name);
  }
  std::mt19937_64 rng(1006);
  for (int i = 0; i < 1000; ++i) {
    const Machine m = tmtest::random_machine(rng, 1 + rng() % 10, 0.15, 0.1);
    const InputWord w = tmtest::random_word(rng, 8);
    const auto [m2, w2] = decode(encode(m, w));
    c.expect(m2 == m && w2.to_string() == w.to_string(), "encoding round-trip");
  }
  c.detail << corpus.size() << " machines agree through the " << universal_machine().num_states()
           << "-state universal machine; 1000 encoding round-trips";
}

void a7(Check& c) {
  std::vector<LabeledProgram> corpus;
  const RunLimits truth = RunLimits::steps(100'000'000);
  for (const CorpusEntry& e : bundled()) {
    if (e.machine.num_states() > kMaxHaltHarmStates) continue;
    LabeledProgram lp;
    lp.name = e.name;
    lp.program = make_halt_harm(e.machine, {});
    lp.truth = harm_of(lp.program, truth);
    corpus.push_back(std::move(lp));
  }
  bool has_c5 = false;
  for (const auto& lp : corpus) has_c5 |= lp.program.source == kChampion5;
  c.expect(has_c5, "corpus holds compiled champion-5");

  const TotalHeuristicOracle total(1'000'000);
  const BoundedSimulationOracle sim(1'000'000);
  const DeciderBackedOracle dec(1'000'000);
  const Scorecard st = evaluate_oracle(total, corpus);
  c.expect(st.errors() >= 1, "total oracle errs");
  c.detail << "total: " << st.errors() << " errors; ";
  for (const HarmOracle* o : std::initializer_list<const HarmOracle*>{&sim, &dec}) {
    const Scorecard s = evaluate_oracle(*o, corpus);
    c.expect(s.errors() == 0, o->name() + " makes no errors");
    c.expect(s.unknowns() > 0, o->name() + " says Unknown");
    c.detail << o->name() << ": " << s.errors() << " errors, " << s.unknowns() << " unknowns; ";
  }

  AuditLog log;
  const RunLimits run_budget = RunLimits::steps(1'000'000);
  for (const HarmOracle* o : std::initializer_list<const HarmOracle*>{&total, &sim, &dec}) {
    for (const auto& lp : corpus) {
      control_gate(*o, lp.program, lp.program.input, GatePolicy::FailClosed, run_budget, &log);
    }
  }
  std::size_t executed = 0;
  for (const AuditRecord& r : log.records()) {
    if (r.answer != HarmKind::Safe) c.expect(!r.executed, "fail-closed never runs " + r.program);
    executed += r.executed;
  }
  c.detail << "fail-closed audit: " << log.records().size() << " decisions, " << executed << " executions, all Safe";
}

void a8(Check& c) {
  std::mt19937_64 rng(1008);
  RiceBudget b;
  b.max_word_length = 2;
  b.start_steps = 16;
  b.max_steps = 256;
  b.deciders.backward_nodes = 2'000;
  b.deciders.cps_max_gram = 3;
  b.jobs = 1;
  std::size_t proved = 0, verdicts = 0;
  auto witnesses_hold = [&](const RiceVerdict& v, const Machine& m1, const Machine* m2) {
    for (const RiceWitness& w : v.witnesses) {
      const Machine& m = w.machine == 0 ? m1 : *m2;
      const auto r = tmtest::naive_run(m, w.word, 100'000);
      if (w.halt_steps) c.expect(r.halted && BigNat(r.steps) == *w.halt_steps, "halting witness");
      if (w.certificate) c.expect(!r.halted, "non-halting witness");
    }
  };
  for (int i = 0; i < 10'000; ++i) {
    const Machine m1 = tmtest::random_machine(rng, 1 + rng() % 4, 0.1, 0.1);
    const Machine m2 = tmtest::random_machine(rng, 1 + rng() % 4, 0.1, 0.1);
    RiceVerdict v;
    switch (i % 4) {
      case 0: v = semi_decide_emptiness(m1, b); break;
      case 1: v = semi_decide_all_strings(m1, b); break;
      case 2: v = semi_decide_password(m1, b); break;
      default: v = semi_decide_equivalence(m1, m2, b); break;
    }
    c.expect(one_sided(v), "one-sided " + std::string(to_string(v.problem)));
    c.expect(replay(v, m1, &m2), "replay " + std::string(to_string(v.problem)));
    witnesses_hold(v, m1, &m2);
    ++verdicts;
    proved += v.kind != RiceKind::Unknown;
  }
  c.detail << verdicts << " verdicts, " << proved << " proved, all in the semi-decidable direction with replaying witnesses";
}

void a9(Check& c) {
  const CorpusEntry* e = nullptr;
  const auto corpus = bundled();
  e = find_entry(corpus, "six-state-record");
  c.expect(e != nullptr, "six-state text bundled");
  if (!e) return;
  for (const BigNat& budget : {BigNat(1'000'000), BigNat(10'000'000)}) {
    for (Engine eng : {Engine::Direct, Engine::Accelerated}) {
      const RunOutcome o = run(e->machine, {}, RunLimits::steps(budget), eng);
      c.expect(o.kind == OutcomeKind::StepLimit && o.steps == budget, "StepLimit at " + to_decimal(budget));
    }
  }
  const RunOutcome big = run_accelerated(e->machine, {}, RunLimits::steps(100'000'000));
  c.expect(big.kind == OutcomeKind::StepLimit, "StepLimit at 10^8");
  c.detail << "not reproduced: StepLimit at 10^6 and 10^7 (both steppers) and 10^8 (accelerated, " << big.marks
           << " marks so far)";
}

void a10(Check& c) {
  std::size_t texts = 0;
  for (const CorpusEntry& e : bundled()) {
    c.expect(serialize_machine(parse_machine(e.text)) == e.text, "bundled " + e.name);
    c.expect(parse_machine(serialize_machine(e.machine)) == e.machine, "bundled machine " + e.name);
    ++texts;
  }
  std::mt19937_64 rng(1010);
  for (int i = 0; i < 10'000; ++i) {
    const Machine m = tmtest::random_machine(rng, 1 + rng() % kMaxTextStates, 0.2, 0.1);
    const std::string t = serialize_machine(m);
    c.expect(parse_machine(t) == m && serialize_machine(parse_machine(t)) == t, "fuzzed round-trip " + t);
    ++texts;
  }

  // Two independent passes over the same runs store identical content hashes.
  const fs::path root = fs::temp_directory_path() / ("tmlab-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::set<std::string>> passes;
  for (int pass = 0; pass < 2; ++pass) {
    CorpusStore store(root / std::to_string(pass));
    std::vector<ResultRecord> records;
    for (const CorpusEntry& e : bundled()) {
      const RunLimits lim = RunLimits::steps(10'000'000);
      records.push_back(outcome_record(e.text, {}, lim, run_accelerated(e.machine, {}, lim)));
      records.push_back(verdict_record(e.text, {}, lim, decide_all(e.machine, {}, RunLimits::steps(100'000))));
    }
    store.append(records);
    const AppendResult again = store.append(records);
    c.expect(again.appended == 0, "re-run adds nothing");
    std::set<std::string> hashes;
    for (const ResultRecord& r : store.query()) hashes.insert(r.hash);
    passes.push_back(std::move(hashes));
  }
  fs::remove_all(root);
  c.expect(passes[0] == passes[1] && !passes[0].empty(), "identical hashes across re-runs");
  c.detail << texts << " texts round-trip byte-exactly; " << passes[0].size() << " stored hashes identical across re-runs";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> checks = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}};
  int failed = 0;
  for (const auto& [id, f] : checks) {
    Check c;
    try {
      f(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    std::cout << id << ' ' << (c.ok ? "PASS" : "FAIL") << "  " << c.detail.str() << std::endl;
    failed += !c.ok;
  }
  return failed ? 1 : 0;
}
