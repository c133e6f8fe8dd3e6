// tmlab command line. Exit codes: 0 success, 1 error, 2 undecided.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "tmlab/batch.hpp"
#include "tmlab/containment.hpp"
#include "tmlab/enumerate.hpp"
#include "tmlab/format.hpp"
#include "tmlab/records.hpp"
#include "tmlab/rice.hpp"
#include "tmlab/store.hpp"
#include "tmlab/utm.hpp"

namespace fs = std::filesystem;
using namespace tmlab;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUndecided = 2;

// Error with a machine-readable code for the diagnostic line.
struct CliError : std::runtime_error {
  CliError(std::string c, const std::string& what) : std::runtime_error(what), code(std::move(c)) {}
  std::string code;
};

BigNat count(const std::string& text, const std::string& what) {
  try {
    return parse_count(text);
  } catch (const std::exception& e) {
    throw CliError("usage", what + ": " + e.what());
  }
}

struct Common {
  bool json = false;
  std::string max_steps;
  std::uint64_t max_cells = kDefaultMaxCells;
  std::int64_t timeout_ms = 0;
  std::string store;
  bool save = false;
  int jobs = 0;

  RunLimits limits(const BigNat& fallback) const {
    RunLimits lim;
    lim.max_steps = max_steps.empty() ? fallback : count(max_steps, "--max-steps");
    if (lim.max_steps < 1) throw CliError("usage", "--max-steps must be at least 1");
    lim.max_cells = max_cells;
    if (timeout_ms > 0) lim.wall_clock = std::chrono::milliseconds(timeout_ms);
    return lim;
  }
};

void add_limits(CLI::App* sub, Common& c) {
  sub->add_option("--max-steps", c.max_steps, "step budget (decimal, 1e6 or 10^6)");
  sub->add_option("--max-cells", c.max_cells, "tape span budget");
  sub->add_option("--timeout-ms", c.timeout_ms, "wall-clock budget per run");
}

void add_output(CLI::App* sub, Common& c) {
  sub->add_flag("--json", c.json, "one JSON record per line");
  sub->add_option("--store", c.store, "append records to this store (implies --save)");
  sub->add_flag("--save", c.save, "append records to the store ($TMLAB_CORPUS or ./results)");
}

fs::path data_dir() {
  if (const char* env = std::getenv("TMLAB_DATA"); env && *env) return env;
  return TMLAB_DATA_DIR;
}

struct NamedMachine {
  std::string name;
  std::string text;
  Machine machine;
};

// A machine text, or "-" for one machine text per stdin line (blank lines
// and '#' comments skipped; a leading name column is allowed).
std::vector<NamedMachine> read_machines(const std::string& arg) {
  std::vector<NamedMachine> out;
  auto add = [&](const std::string& name, const std::string& text) {
    try {
      out.push_back({name, text, parse_machine(text)});
    } catch (const FormatError& e) {
      throw CliError("parse", "'" + text + "' at offset " + std::to_string(e.offset()) + ": " + e.what());
    }
  };
  if (arg != "-") {
    add(arg, arg);
    return out;
  }
  std::string line;
  while (std::getline(std::cin, line)) {
    std::istringstream ss(line);
    std::vector<std::string> cols;
    for (std::string w; ss >> w;) cols.push_back(w);
    if (cols.empty() || cols[0][0] == '#') continue;
    // Either "text ..." or "name text ..." (corpus lines).
    bool first_is_text = true;
    try {
      parse_machine(cols[0]);
    } catch (const FormatError&) {
      first_is_text = cols.size() < 2;
    }
    if (first_is_text) {
      add(cols[0], cols[0]);
    } else {
      add(cols[0], cols[1]);
    }
  }
  return out;
}

InputWord input_word(const std::string& s) {
  try {
    return InputWord::from_string(s);
  } catch (const std::invalid_argument& e) {
    throw CliError("parse", e.what());
  }
}

class Output {
 public:
  explicit Output(const Common& c) : c_(c) {}

  void emit(const ResultRecord& r, const std::string& human) {
    if (c_.json) {
      std::cout << record_line(r) << '\n';
    } else if (!human.empty()) {
      std::cout << human << '\n';
    }
    records_.push_back(r);
  }

  void finish() {
    if (!c_.save && c_.store.empty()) return;
    CorpusStore store(c_.store.empty() ? default_store_root() : fs::path(c_.store));
    try {
      const AppendResult res = store.append(records_);
      std::cerr << "stored " << res.appended << " record(s) under " << store.root().string();
      if (!res.note.empty()) std::cerr << "; " << res.note;
      std::cerr << '\n';
    } catch (const StoreError& e) {
      throw CliError("io", e.what());
    }
  }

 private:
  const Common& c_;
  std::vector<ResultRecord> records_;
};

std::string outcome_line(const std::string& name, const RunOutcome& o) {
  std::ostringstream s;
  s << name << "  " << to_string(o.kind) << "  steps=" << to_decimal(o.steps) << "  marks=" << o.marks;
  if (o.halted_via_gadget) s << "  via-gadget";
  return s.str();
}

// ---- run ----

struct RunArgs {
  std::string machine;
  std::string input;
  std::string accel = "auto";
};

int cmd_run(const RunArgs& a, const Common& c) {
  const auto machines = read_machines(a.machine);
  const InputWord w = input_word(a.input);
  const RunLimits lim = c.limits(kDefaultMaxSteps);
  const Engine engine = a.accel == "off" ? Engine::Direct : Engine::Accelerated;
  std::vector<BatchItem> items;
  for (const auto& m : machines) items.push_back({m.machine, w});

  const auto t0 = std::chrono::steady_clock::now();
  const auto outcomes = run_batch(items, lim, engine, c.jobs);
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  // auto: cross-check small runs against the direct stepper.
  if (a.accel == "auto" && lim.max_steps <= 1'000'000) {
    const auto direct = run_batch(items, lim, Engine::Direct, c.jobs);
    for (std::size_t i = 0; i < direct.size(); ++i) {
      if (!same_observable(direct[i], outcomes[i])) {
        throw CliError("internal", "accelerated and direct runs disagree on " + machines[i].text);
      }
    }
  }
  Output out(c);
  for (std::size_t i = 0; i < machines.size(); ++i) {
    out.emit(outcome_record(machines[i].text, w, lim, outcomes[i], elapsed), outcome_line(machines[i].name, outcomes[i]));
  }
  out.finish();
  return kOk;
}

// ---- trace ----

int cmd_trace(const std::string& text, const std::string& input, std::size_t k, const Common& c) {
  const NamedMachine nm = read_machines(text).at(0);
  const InputWord w = input_word(input);
  const auto configs = trace(nm.machine, w, k);
  Json arr = Json::array();
  std::ostringstream h;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const Configuration& cf = configs[i];
    Extent e = cf.tape.extent();
    e.include(cf.head);
    std::string tape;
    for (std::int64_t p = e.lo; p <= e.hi; ++p) {
      const char sym = static_cast<char>('0' + cf.tape.cell(p));
      if (p == cf.head) {
        tape += '[';
        tape += sym;
        tape += ']';
      } else {
        tape += sym;
      }
    }
    const char state = state_letter(cf.state);
    arr.push_back({{"step", i}, {"state", std::string(1, state)}, {"head", cf.head}, {"tape", tape}});
    if (i) h << '\n';
    h << i << "  " << state << "  " << tape;
  }
  // Fewer configurations than asked for means the run halted.
  const bool halted = configs.size() < k || (!configs.empty() && configs.back().halted());
  ResultRecord r;
  r.kind = "trace";
  r.machine = nm.text;
  r.input = w.to_string();
  r.budget = {{"configs", k}};
  r.payload = {{"status", halted ? "Halted" : "Running"}, {"configs", arr}};
  Output out(c);
  out.emit(seal(std::move(r)), h.str());
  out.finish();
  return kOk;
}

// ---- decide ----

int cmd_decide(const std::string& text, const std::string& input, bool no_ext, const Common& c) {
  const auto machines = read_machines(text);
  const InputWord w = input_word(input);
  const RunLimits lim = c.limits(100'000);
  DeciderOptions opt;
  opt.extensions = !no_ext;
  std::vector<Verdict> verdicts(machines.size());
  const auto n = static_cast<std::int64_t>(machines.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(c.jobs > 0 ? c.jobs : omp_get_max_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    verdicts[static_cast<std::size_t>(i)] = decide_all(machines[static_cast<std::size_t>(i)].machine, w, lim, opt);
  }
  Output out(c);
  bool undecided = false;
  for (std::size_t i = 0; i < machines.size(); ++i) {
    const Verdict& v = verdicts[i];
    std::string human = machines[i].name + "  " + std::string(to_string(v.kind));
    if (v.kind == VerdictKind::Halts) human += "  steps=" + to_decimal(v.steps) + "  marks=" + std::to_string(v.marks);
    if (v.kind == VerdictKind::NeverHalts) human += "  " + describe(*v.certificate);
    if (v.kind == VerdictKind::Unknown) {
      human += "  budget=" + to_decimal(v.budget_spent);
      undecided = true;
    }
    out.emit(verdict_record(machines[i].text, w, lim, v), human);
  }
  out.finish();
  return undecided ? kUndecided : kOk;
}

// ---- beaver-verify ----

struct VerifyArgs {
  std::vector<std::string> machines;
  std::string corpus;
  std::optional<std::uint64_t> threshold;
  std::string budget;
  std::optional<std::uint64_t> expect_steps;
  std::optional<std::uint64_t> expect_marks;
};

int cmd_beaver_verify(const VerifyArgs& a, const Common& c) {
  Common cc = c;
  if (!a.budget.empty()) cc.max_steps = a.budget;
  const RunLimits lim = cc.limits(kDefaultMaxSteps);
  std::vector<CorpusEntry> entries;
  if (!a.corpus.empty()) {
    try {
      entries = load_corpus(a.corpus);
    } catch (const FormatError& e) {
      throw CliError("parse", a.corpus + " line " + std::to_string(e.line()) + ": " + e.what());
    } catch (const std::exception& e) {
      throw CliError("io", e.what());
    }
  }
  for (const std::string& t : a.machines) {
    for (const auto& m : read_machines(t)) {
      CorpusEntry e;
      e.name = m.name;
      e.text = m.text;
      e.machine = m.machine;
      if (a.expect_steps && a.expect_marks) {
        e.expected = ExpectedCounts{*a.expect_steps, *a.expect_marks};
        e.status = CorpusStatus::Halts;
      }
      entries.push_back(std::move(e));
    }
  }
  if (entries.empty()) throw CliError("usage", "no machines given");

  Output out(c);
  bool undecided = false;
  bool mismatch = false;
  for (const CorpusEntry& e : entries) {
    if (a.threshold) {
      const ThresholdAnswer t = busy_beaver_threshold(e.machine, *a.threshold, lim);
      ResultRecord r;
      r.kind = "threshold";
      r.machine = e.text;
      r.budget = limits_to_json(lim);
      r.payload = threshold_to_json(t, *a.threshold);
      undecided |= t.kind == ThresholdKind::Unknown;
      out.emit(seal(std::move(r)), e.name + "  more than " + std::to_string(*a.threshold) + " marks: " +
                                       std::string(to_string(t.kind)));
      continue;
    }
    RunLimits l = lim;
    if (e.expected) l.max_steps = std::max<BigNat>(l.max_steps, BigNat(e.expected->steps) + 1);
    Verdict v;
    const RunOutcome o = run_accelerated(e.machine, {}, l);
    if (o.halted()) {
      v = Verdict::halts(o.steps, o.marks);
    } else {
      v = decide_all(e.machine, {}, l);
    }
    std::string human = e.name + "  " + std::string(to_string(v.kind));
    if (v.kind == VerdictKind::Halts) human += "  steps=" + to_decimal(v.steps) + "  marks=" + std::to_string(v.marks);
    if (v.kind == VerdictKind::NeverHalts) human += "  " + describe(*v.certificate);
    if (e.expected) {
      const bool ok = v.kind == VerdictKind::Halts && v.steps == e.expected->steps && v.marks == e.expected->marks;
      human += ok ? "  matches record" : "  MISMATCH (record " + std::to_string(e.expected->steps) + " steps, " +
                                            std::to_string(e.expected->marks) + " marks)";
      mismatch |= !ok;
    } else if (e.status == CorpusStatus::CertifiedNonhalting && v.kind == VerdictKind::Halts) {
      human += "  MISMATCH (listed as non-halting)";
      mismatch = true;
    }
    undecided |= v.kind == VerdictKind::Unknown;
    out.emit(verdict_record(e.text, {}, l, v), human);
  }
  out.finish();
  if (mismatch) {
    std::cerr << "tmlab: error: mismatch: a machine disagrees with its listed record\n";
    return kError;
  }
  return undecided ? kUndecided : kOk;
}

// ---- beaver-enumerate ----

int cmd_beaver_enumerate(std::size_t n, bool serial, bool no_ext, const Common& c) {
  EnumerationOptions opt;
  opt.budget = c.limits(100'000);
  if (c.max_cells == kDefaultMaxCells) opt.budget.max_cells = 1 << 20;
  opt.deciders.extensions = !no_ext;
  opt.jobs = c.jobs;
  EnumerationReport rep;
  try {
    rep = serial ? enumerate_serial(n, opt) : enumerate(n, opt);
  } catch (const std::invalid_argument& e) {
    throw CliError("usage", e.what());
  }
  ResultRecord r;
  r.kind = "enumeration";
  r.budget = limits_to_json(opt.budget);
  r.payload = report_to_json(rep);
  std::ostringstream h;
  h << "n=" << n << "  sigma=" << rep.sigma << "  s=" << rep.s << "  halting=" << rep.halting
    << "  nonhalting=" << rep.nonhalting << "  holdouts=" << rep.holdouts.size();
  for (const auto& t : rep.champions) h << "\n  sigma champion " << t;
  for (const auto& t : rep.step_champions) h << "\n  step champion  " << t;
  for (const auto& t : rep.holdouts) h << "\n  holdout        " << t;
  Output out(c);
  out.emit(seal(std::move(r)), h.str());
  out.finish();
  return rep.closed() ? kOk : kUndecided;
}

// ---- utm ----

Json recovery_json(const UtmRecovery& r) {
  std::string cells;
  for (Symbol s : r.cells) cells.push_back(static_cast<char>('0' + s));
  return {{"halted", r.halted}, {"steps", to_decimal(r.steps)}, {"marks", r.marks}, {"head", r.head}, {"cells", cells}};
}

int cmd_utm(const std::string& text, const std::string& input, bool show_encoding, const Common& c) {
  const NamedMachine nm = read_machines(text).at(0);
  const InputWord w = input_word(input);
  const RunLimits lim = c.limits(kDefaultMaxSteps);
  UtmEncoding enc;
  try {
    enc = encode(nm.machine, w);
  } catch (const std::invalid_argument& e) {
    throw CliError("usage", e.what());
  }
  if (show_encoding && !c.json) std::cout << encoding_text(enc) << '\n';
  const RunOutcome u = run_via_utm(enc, lim);
  const RunOutcome d = run_direct(nm.machine, w, lim);
  Json payload = {{"utm_states", universal_machine().num_states()},
                  {"utm_outcome", outcome_to_json(u)},
                  {"direct", recovery_json(recovery_of(d))},
                  {"encoding", encoding_text(enc)}};
  std::string status;
  std::ostringstream h;
  h << "universal machine (" << universal_machine().num_states() << " states): " << to_string(u.kind)
    << " after " << to_decimal(u.steps) << " steps\n";
  if (u.halted()) {
    const UtmRecovery rec = recover(u);
    payload["recovered"] = recovery_json(rec);
    const bool agree = d.halted() && same_recovery(rec, recovery_of(d));
    status = agree ? "agree" : "disagree";
    h << "recovered: " << (rec.halted ? "halted" : "running") << "  steps=" << to_decimal(rec.steps)
      << "  marks=" << rec.marks << '\n';
  } else {
    status = "unfinished";
  }
  h << "direct:    " << to_string(d.kind) << "  steps=" << to_decimal(d.steps) << "  marks=" << d.marks << '\n'
    << status;
  payload["status"] = status;
  ResultRecord r;
  r.kind = "utm";
  r.machine = nm.text;
  r.input = w.to_string();
  r.budget = limits_to_json(lim);
  r.payload = std::move(payload);
  Output out(c);
  out.emit(seal(std::move(r)), h.str());
  out.finish();
  if (status == "disagree") throw CliError("internal", "universal run disagrees with direct run");
  return status == "agree" ? kOk : kUndecided;
}

// ---- contain-build ----

int cmd_contain_build(const std::string& text, const std::string& input, bool raw, bool run_it, const Common& c) {
  const NamedMachine nm = read_machines(text).at(0);
  const InputWord w = input_word(input);
  ContainedProgram p;
  try {
    p = raw ? make_raw(nm.machine, w) : make_halt_harm(nm.machine, w);
  } catch (const std::invalid_argument& e) {
    throw CliError("usage", e.what());
  }
  const RunLimits lim = c.limits(kDefaultMaxSteps);
  Json payload = {{"origin", std::string(to_string(p.origin))},
                  {"program", program_text(p)},
                  {"states", p.machine.num_states()},
                  {"status", "built"}};
  if (p.g1) payload["gadget"] = {std::string(1, state_letter(*p.g1)), std::string(1, state_letter(*p.g2))};
  std::ostringstream h;
  h << program_text(p);
  if (run_it) {
    const RunOutcome o = run_program(p, w, lim);
    payload["outcome"] = outcome_to_json(o);
    payload["status"] = o.halted_via_gadget ? "harm" : std::string(to_string(o.kind));
    h << '\n' << outcome_line("run", o);
  }
  ResultRecord r;
  r.kind = "program";
  r.machine = nm.text;
  r.input = w.to_string();
  if (run_it) r.budget = limits_to_json(lim);
  r.payload = std::move(payload);
  Output out(c);
  out.emit(seal(std::move(r)), h.str());
  out.finish();
  return kOk;
}

// ---- contain-eval ----

struct EvalArgs {
  std::vector<std::string> oracles{"total:1000000", "simulate:1000000", "deciders:1000000"};
  std::vector<std::string> corpora;
  std::string truth_steps = "100000000";
  std::string policy = "fail-closed";
  std::string audit;
};

int cmd_contain_eval(const EvalArgs& a, const Common& c) {
  const auto policy = parse_gate_policy(a.policy);
  if (!policy) throw CliError("usage", "--policy must be fail-closed or fail-open");
  std::vector<std::string> files = a.corpora;
  if (files.empty()) files = {(data_dir() / "champions.tsv").string(), (data_dir() / "machines.tsv").string()};

  RunLimits truth_lim = RunLimits::steps(count(a.truth_steps, "--truth-steps"));
  std::vector<LabeledProgram> corpus;
  for (const auto& f : files) {
    std::vector<CorpusEntry> entries;
    try {
      entries = load_corpus(f);
    } catch (const FormatError& e) {
      throw CliError("parse", f + " line " + std::to_string(e.line()) + ": " + e.what());
    } catch (const std::exception& e) {
      throw CliError("io", e.what());
    }
    for (const auto& e : entries) {
      if (e.machine.num_states() > kMaxHaltHarmStates) continue;
      corpus.push_back({"halt-harm:" + e.name, make_halt_harm(e.machine, {}), {}});
      corpus.push_back({"raw:" + e.name, make_raw(e.machine, {}), {}});
    }
  }
  const auto n = static_cast<std::int64_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(c.jobs > 0 ? c.jobs : omp_get_max_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    auto& item = corpus[static_cast<std::size_t>(i)];
    item.truth = harm_of(item.program, truth_lim);
  }

  const RunLimits run_budget = c.limits(1'000'000);
  Output out(c);
  AuditLog log;
  for (const auto& spec : a.oracles) {
    std::unique_ptr<HarmOracle> oracle;
    try {
      oracle = make_oracle(spec);
    } catch (const std::invalid_argument& e) {
      throw CliError("usage", e.what());
    }
    const Scorecard s = evaluate_oracle(*oracle, corpus, c.jobs);
    std::size_t executed = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& item = corpus[i];
      OracleAnswer ans;
      ans.kind = s.items[i].answer;
      ans.justification = s.items[i].justification;
      executed += apply_gate(s.oracle, std::move(ans), item.program, item.program.input, *policy, run_budget, &log).executed;
    }
    std::ostringstream h;
    h << s.oracle << "\n  correct: harmful " << s.correct_harmful << ", safe " << s.correct_safe
      << "\n  errors:  false harmful " << s.false_harmful << ", false safe " << s.false_safe
      << "\n  unknown: on harmful " << s.unknown_on_harmful << ", on safe " << s.unknown_on_safe << ", on unknown "
      << s.unknown_on_unknown << "\n  gate (" << to_string(*policy) << "): executed " << executed << " of "
      << corpus.size();
    for (const auto& it : s.items) {
      const bool wrong = (it.truth == HarmKind::Harmful && it.answer == HarmKind::Safe) ||
                         (it.truth == HarmKind::Safe && it.answer == HarmKind::Harmful);
      if (wrong) h << "\n  wrong on " << it.name << ": said " << to_string(it.answer) << ", truth " << to_string(it.truth);
    }
    ResultRecord r;
    r.kind = "scorecard";
    r.budget = {{"truth", limits_to_json(truth_lim)}, {"gate", limits_to_json(run_budget)}};
    r.payload = scorecard_to_json(s);
    r.payload["status"] = s.errors() ? "errors" : "clean";
    r.payload["policy"] = std::string(to_string(*policy));
    r.payload["executed"] = executed;
    out.emit(seal(std::move(r)), h.str());
  }
  if (!a.audit.empty()) {
    std::ofstream f(a.audit, std::ios::app);
    if (!f) throw CliError("io", "cannot open " + a.audit);
    log.write_jsonl(f);
  }
  out.finish();
  return kOk;
}

// ---- rice ----

struct RiceArgs {
  std::string problem;
  std::vector<std::string> machines;
  std::size_t max_length = 4;
  std::string start_steps = "16";
};

int cmd_rice(const RiceArgs& a, const Common& c) {
  const auto problem = parse_rice_problem(a.problem);
  if (!problem) throw CliError("usage", "problem must be emptiness, all-strings, password or equivalence");
  const std::size_t need = *problem == RiceProblem::Equivalence ? 2 : 1;
  if (a.machines.size() != need) throw CliError("usage", std::string(to_string(*problem)) + " takes " + std::to_string(need) + " machine(s)");
  std::vector<NamedMachine> ms;
  for (const auto& t : a.machines) ms.push_back(read_machines(t).at(0));
  RiceBudget b;
  b.max_word_length = a.max_length;
  b.start_steps = count(a.start_steps, "--start-steps");
  b.max_steps = c.limits(100'000).max_steps;
  b.jobs = c.jobs;
  RiceVerdict v;
  switch (*problem) {
    case RiceProblem::Emptiness: v = semi_decide_emptiness(ms[0].machine, b); break;
    case RiceProblem::AllStrings: v = semi_decide_all_strings(ms[0].machine, b); break;
    case RiceProblem::Password: v = semi_decide_password(ms[0].machine, b); break;
    case RiceProblem::Equivalence: v = semi_decide_equivalence(ms[0].machine, ms[1].machine, b); break;
  }
  if (!replay(v, ms[0].machine, need == 2 ? &ms[1].machine : nullptr)) {
    throw CliError("internal", "witness failed to replay");
  }
  ResultRecord r;
  r.kind = "rice";
  r.machine = ms[0].text;
  r.budget = {{"max_word_length", b.max_word_length}, {"start_steps", to_decimal(b.start_steps)},
              {"max_steps", to_decimal(b.max_steps)}};
  r.payload = rice_to_json(v);
  if (need == 2) r.payload["machine2"] = ms[1].text;
  std::ostringstream h;
  h << to_string(v.problem) << ": " << to_string(v.kind);
  for (const auto& w : v.witnesses) {
    h << "\n  machine " << w.machine + 1 << " on \"" << w.word.to_string() << "\": ";
    if (w.halt_steps) h << "halts in " << to_decimal(*w.halt_steps) << (*w.halt_steps == 1 ? " step" : " steps");
    if (w.certificate) h << "never halts, " << describe(*w.certificate);
  }
  if (!v.note.empty()) h << "\n  " << v.note;
  Output out(c);
  out.emit(seal(std::move(r)), h.str());
  out.finish();
  return v.kind == RiceKind::Unknown ? kUndecided : kOk;
}

// ---- bench ----

int cmd_bench(const std::string& text, const Common& c) {
  const NamedMachine nm = read_machines(text).at(0);
  const RunLimits lim = c.limits(kDefaultMaxSteps);
  Json payload = Json::object();
  std::ostringstream h;
  RunOutcome last;
  for (Engine e : {Engine::Accelerated, Engine::Direct}) {
    const auto t0 = std::chrono::steady_clock::now();
    last = run(nm.machine, {}, lim, e);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* name = e == Engine::Direct ? "direct" : "accelerated";
    const double rate = secs > 0 ? static_cast<double>(last.steps) / secs : 0.0;
    payload[name] = {{"status", std::string(to_string(last.kind))}, {"steps", to_decimal(last.steps)},
                     {"iterations", last.iterations}, {"seconds", secs}};
    h << name << ": " << to_string(last.kind) << "  steps=" << to_decimal(last.steps) << "  iterations="
      << last.iterations << "  " << secs << " s  (" << rate / 1e6 << " M steps/s)\n";
  }
  // Timings are not reproducible, so they live outside the hashed region.
  ResultRecord r;
  r.kind = "outcome";
  r.machine = nm.text;
  r.budget = limits_to_json(lim);
  r.payload = outcome_to_json(last);
  r.meta = {{"bench", payload}};
  Output out(c);
  out.emit(seal(std::move(r)), h.str().substr(0, h.str().size() - 1));
  out.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turing machine laboratory: simulation, deciders, busy beavers, a universal machine, harm containment"};
  app.require_subcommand(1);
  Common common;

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "simulate machines from a blank tape or an input word");
  run_cmd->add_option("machine", run_args.machine, "machine text, or - for one per stdin line")->required();
  run_cmd->add_option("--input", run_args.input, "input word over {0,1}");
  run_cmd->add_option("--accel", run_args.accel, "auto, on or off")->check(CLI::IsMember({"auto", "on", "off"}));
  run_cmd->add_option("--jobs", common.jobs, "threads for batch input");
  add_limits(run_cmd, common);
  add_output(run_cmd, common);

  std::string tr_machine, tr_input;
  std::size_t tr_k = 20;
  auto* trace_cmd = app.add_subcommand("trace", "print the first configurations of a run");
  trace_cmd->add_option("machine", tr_machine)->required();
  trace_cmd->add_option("--input", tr_input);
  trace_cmd->add_option("-n,--configs", tr_k, "number of configurations");
  add_output(trace_cmd, common);

  std::string de_machine, de_input;
  bool de_no_ext = false;
  auto* decide_cmd = app.add_subcommand("decide", "certify halting or non-halting (exit 2 when undecided)");
  decide_cmd->add_option("machine", de_machine, "machine text, or - for one per stdin line")->required();
  decide_cmd->add_option("--input", de_input);
  decide_cmd->add_flag("--core-only", de_no_ext, "cyclers and translated cyclers only");
  decide_cmd->add_option("--jobs", common.jobs);
  add_limits(decide_cmd, common);
  add_output(decide_cmd, common);

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("beaver-verify", "check machines against records or a mark threshold");
  verify_cmd->add_option("machines", va.machines, "machine texts, or - for stdin");
  verify_cmd->add_option("--corpus", va.corpus, "corpus TSV file");
  verify_cmd->add_option("--threshold", va.threshold, "ask: halts with more than K marks?");
  verify_cmd->add_option("--budget", va.budget, "step budget (same as --max-steps)");
  auto* exp_steps = verify_cmd->add_option("--expect-steps", va.expect_steps, "expected step count (with --expect-marks)");
  auto* exp_marks = verify_cmd->add_option("--expect-marks", va.expect_marks, "expected mark count (with --expect-steps)");
  exp_steps->needs(exp_marks);
  exp_marks->needs(exp_steps);
  add_limits(verify_cmd, common);
  add_output(verify_cmd, common);

  std::size_t en_n = 0;
  bool en_serial = false, en_no_ext = false;
  auto* enum_cmd = app.add_subcommand("beaver-enumerate", "classify every n-state machine (exit 2 with holdouts)");
  enum_cmd->add_option("n", en_n, "number of states")->required();
  enum_cmd->add_flag("--serial", en_serial, "serial reference enumeration");
  enum_cmd->add_flag("--core-only", en_no_ext, "cyclers and translated cyclers only");
  enum_cmd->add_option("--jobs", common.jobs);
  add_limits(enum_cmd, common);
  add_output(enum_cmd, common);

  std::string utm_machine, utm_input;
  bool utm_show = false;
  auto* utm_cmd = app.add_subcommand("utm", "run a machine on the universal machine and compare");
  utm_cmd->add_option("machine", utm_machine)->required();
  utm_cmd->add_option("--input", utm_input);
  utm_cmd->add_flag("--show-encoding", utm_show);
  add_limits(utm_cmd, common);
  add_output(utm_cmd, common);

  std::string cb_machine, cb_input;
  bool cb_raw = false, cb_run = false;
  auto* build_cmd = app.add_subcommand("contain-build", "compile HaltHarm(T, I)");
  build_cmd->add_option("machine", cb_machine)->required();
  build_cmd->add_option("--input", cb_input);
  build_cmd->add_flag("--raw", cb_raw, "no gadget");
  build_cmd->add_flag("--run", cb_run, "also run the program");
  add_limits(build_cmd, common);
  add_output(build_cmd, common);

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("contain-eval", "score harm oracles and gate every program");
  eval_cmd->add_option("--oracle", ea.oracles, "simulate:N, deciders:N, total:N, always-safe, always-harmful, exec:CMD");
  eval_cmd->add_option("--corpus", ea.corpora, "corpus TSV files (default: bundled champions and machines)");
  eval_cmd->add_option("--truth-steps", ea.truth_steps, "budget for ground truth");
  eval_cmd->add_option("--policy", ea.policy, "fail-closed or fail-open");
  eval_cmd->add_option("--audit", ea.audit, "append the audit log (JSONL) here");
  eval_cmd->add_option("--jobs", common.jobs);
  add_limits(eval_cmd, common);
  add_output(eval_cmd, common);

  RiceArgs ra;
  auto* rice_cmd = app.add_subcommand("rice", "semi-decide emptiness, all-strings, password or equivalence");
  rice_cmd->add_option("problem", ra.problem)->required();
  rice_cmd->add_option("machines", ra.machines)->required();
  rice_cmd->add_option("--max-length", ra.max_length, "longest input word tried");
  rice_cmd->add_option("--start-steps", ra.start_steps, "first round's step budget");
  rice_cmd->add_option("--jobs", common.jobs);
  add_limits(rice_cmd, common);
  add_output(rice_cmd, common);

  std::string bench_machine = "1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA";
  auto* bench_cmd = app.add_subcommand("bench", "time both steppers on one machine");
  bench_cmd->add_option("machine", bench_machine);
  add_limits(bench_cmd, common);
  add_output(bench_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "tmlab: error: usage: " << e.what() << '\n';
    return kError;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, common);
    if (*trace_cmd) return cmd_trace(tr_machine, tr_input, tr_k, common);
    if (*decide_cmd) return cmd_decide(de_machine, de_input, de_no_ext, common);
    if (*verify_cmd) return cmd_beaver_verify(va, common);
    if (*enum_cmd) return cmd_beaver_enumerate(en_n, en_serial, en_no_ext, common);
    if (*utm_cmd) return cmd_utm(utm_machine, utm_input, utm_show, common);
    if (*build_cmd) return cmd_contain_build(cb_machine, cb_input, cb_raw, cb_run, common);
    if (*eval_cmd) return cmd_contain_eval(ea, common);
    if (*rice_cmd) return cmd_rice(ra, common);
    if (*bench_cmd) return cmd_bench(bench_machine, common);
  } catch (const CliError& e) {
    std::cerr << "tmlab: error: " << e.code << ": " << e.what() << '\n';
    return kError;
  } catch (const FormatError& e) {
    std::cerr << "tmlab: error: parse: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "tmlab: error: internal: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
