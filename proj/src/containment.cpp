#include "tmlab/containment.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <omp.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tmlab/format.hpp"

namespace tmlab {

std::string_view to_string(ProgramOrigin o) { return o == ProgramOrigin::Raw ? "raw" : "halt-harm"; }

std::string_view to_string(HarmKind k) {
  switch (k) {
    case HarmKind::Harmful: return "Harmful";
    case HarmKind::Safe: return "Safe";
    case HarmKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<HarmKind> parse_harm_kind(std::string_view s) {
  if (s == "Harmful" || s == "HARMFUL") return HarmKind::Harmful;
  if (s == "Safe" || s == "SAFE") return HarmKind::Safe;
  if (s == "Unknown" || s == "UNKNOWN") return HarmKind::Unknown;
  return std::nullopt;
}

std::string_view to_string(GatePolicy p) { return p == GatePolicy::FailClosed ? "fail-closed" : "fail-open"; }

std::optional<GatePolicy> parse_gate_policy(std::string_view s) {
  if (s == "fail-closed") return GatePolicy::FailClosed;
  if (s == "fail-open") return GatePolicy::FailOpen;
  return std::nullopt;
}

ContainedProgram make_halt_harm(const Machine& t, const InputWord& i) {
  const std::size_t n = t.num_states();
  if (n == 0 || n > kMaxHaltHarmStates) {
    throw std::invalid_argument("halt-harm needs a machine with 1 to " + std::to_string(kMaxHaltHarmStates) + " states");
  }
  const auto g1 = static_cast<StateIndex>(n);
  const auto g2 = static_cast<StateIndex>(n + 1);
  Machine c(n + 2);
  for (StateIndex q = 0; q < n; ++q) {
    for (Symbol s = 0; s < 2; ++s) {
      const auto& tr = t.at(q, s);
      if (!tr) {
        c.set(q, s, Transition{s, Move::Right, g1});
      } else if (tr->halts()) {
        c.set(q, s, Transition{tr->write, tr->move, g1});
      } else {
        c.set(q, s, *tr);
      }
    }
  }
  for (Symbol s = 0; s < 2; ++s) {
    c.set(g1, s, Transition{1, Move::Right, g2});
    c.set(g2, s, Transition{1, Move::Left, kHaltState});
  }
  ContainedProgram p;
  p.machine = std::move(c);
  p.origin = ProgramOrigin::HaltHarm;
  p.input = i;
  p.g1 = g1;
  p.g2 = g2;
  p.source = n <= kMaxTextStates ? serialize_machine(t) : std::string();
  return p;
}

ContainedProgram make_raw(const Machine& m, const InputWord& input) {
  ContainedProgram p;
  p.machine = m;
  p.input = input;
  p.source = m.num_states() <= kMaxTextStates ? serialize_machine(m) : std::string();
  return p;
}

std::string program_text(const ContainedProgram& p) {
  return p.machine.num_states() <= kMaxTextStates ? serialize_machine(p.machine) : std::string();
}

RunOutcome run_program(const ContainedProgram& p, const InputWord& w, const RunLimits& lim, Engine engine) {
  RunOutcome o = run(p.machine, w, lim, engine);
  o.halted_via_gadget = p.g2 && o.halted() && o.halt_form == HaltForm::ViaZ && o.halting_state == p.g2;
  return o;
}

OracleAnswer OracleAnswer::harmful(BigNat steps, std::string why) {
  OracleAnswer a;
  a.kind = HarmKind::Harmful;
  a.steps = std::move(steps);
  a.justification = std::move(why);
  return a;
}

OracleAnswer OracleAnswer::safe(std::string why, std::optional<Certificate> c) {
  OracleAnswer a;
  a.kind = HarmKind::Safe;
  a.justification = std::move(why);
  a.certificate = std::move(c);
  return a;
}

OracleAnswer OracleAnswer::unknown(std::string why) {
  OracleAnswer a;
  a.justification = std::move(why);
  return a;
}

namespace {

OracleAnswer simulated(const ContainedProgram& p, const InputWord& w, const BigNat& budget, RunOutcome& out) {
  RunLimits lim = RunLimits::steps(budget);
  out = run_program(p, w, lim);
  if (out.halted_via_gadget) return OracleAnswer::harmful(out.steps, "entered the gadget at step " + to_decimal(out.steps));
  if (out.halted()) return OracleAnswer::safe("halted outside the gadget at step " + to_decimal(out.steps));
  return OracleAnswer::unknown(std::string(to_string(out.kind)) + " after " + to_decimal(out.steps) + " steps");
}

}  // namespace

HarmLabel harm_of(const ContainedProgram& p, const RunLimits& lim, const DeciderOptions& opt) {
  if (p.origin == ProgramOrigin::Raw) return OracleAnswer::safe("raw program has no gadget");
  RunLimits small = lim;
  small.max_steps = std::min(lim.max_steps, kTruthDeciderSteps);
  auto by_run = [&](const RunLimits& l) -> std::optional<HarmLabel> {
    const RunOutcome o = run_program(p, p.input, l);
    if (o.halted_via_gadget) return OracleAnswer::harmful(o.steps, "entered the gadget at step " + to_decimal(o.steps));
    if (o.halted()) return OracleAnswer::safe("halted outside the gadget");
    return std::nullopt;
  };
  if (auto a = by_run(small)) return *a;
  const Verdict v = decide_all(p.machine, p.input, small, opt);
  if (v.kind == VerdictKind::NeverHalts) return OracleAnswer::safe("never halts: " + describe(*v.certificate), v.certificate);
  if (small.max_steps < lim.max_steps) {
    if (auto a = by_run(lim)) return *a;
  }
  return OracleAnswer::unknown("no decision within " + to_decimal(lim.max_steps) + " steps");
}

std::string BoundedSimulationOracle::name() const { return "simulate:" + to_decimal(budget_); }

OracleAnswer BoundedSimulationOracle::judge(const ContainedProgram& p, const InputWord& w) const {
  RunOutcome o;
  return simulated(p, w, budget_, o);
}

std::string DeciderBackedOracle::name() const { return "deciders:" + to_decimal(budget_); }

OracleAnswer DeciderBackedOracle::judge(const ContainedProgram& p, const InputWord& w) const {
  RunOutcome o;
  OracleAnswer a = simulated(p, w, budget_, o);
  if (a.kind != HarmKind::Unknown) return a;
  const Verdict v = decide_all(p.machine, w, RunLimits::steps(budget_), opt_);
  if (v.kind == VerdictKind::NeverHalts) return OracleAnswer::safe("never halts: " + describe(*v.certificate), v.certificate);
  return a;
}

std::string TotalHeuristicOracle::name() const { return "total:" + to_decimal(budget_); }

OracleAnswer TotalHeuristicOracle::judge(const ContainedProgram& p, const InputWord& w) const {
  RunOutcome o;
  OracleAnswer a = simulated(p, w, budget_, o);
  if (a.kind == HarmKind::Unknown) return OracleAnswer::safe("guess: no harm within " + to_decimal(budget_) + " steps");
  return a;
}

std::string ConstantOracle::name() const { return answer_ == HarmKind::Safe ? "always-safe" : "always-harmful"; }

OracleAnswer ConstantOracle::judge(const ContainedProgram&, const InputWord&) const {
  OracleAnswer a;
  a.kind = answer_;
  a.justification = "constant answer";
  return a;
}

std::string ExternalProcessOracle::name() const { return "exec:" + command_; }

namespace {

// Writes all of data; false on error.
bool write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t k = ::write(fd, data.data() + done, data.size() - done);
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) return false;
    done += static_cast<std::size_t>(k);
  }
  return true;
}

}  // namespace

OracleAnswer ExternalProcessOracle::judge(const ContainedProgram& p, const InputWord& w) const {
  const std::string text = program_text(p);
  if (text.empty()) return OracleAnswer::unknown("program has no letter text");
  int to_child[2], from_child[2];
  if (::pipe(to_child) != 0) return OracleAnswer::unknown("pipe failed");
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    return OracleAnswer::unknown("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    return OracleAnswer::unknown("fork failed");
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);

  // A child that exits without reading stdin must not kill us with SIGPIPE.
  struct sigaction ignore {}, previous {};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &previous);
  write_all(to_child[1], text + "\t" + w.to_string() + "\t" + to_decimal(budget_) + "\n");
  ::close(to_child[1]);
  ::sigaction(SIGPIPE, &previous, nullptr);

  std::string output;
  bool timed_out = false;
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  char buf[4096];
  while (true) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{from_child[0], POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) {
      timed_out = true;
      break;
    }
    const ssize_t k = ::read(from_child[0], buf, sizeof buf);
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) break;
    output.append(buf, static_cast<std::size_t>(k));
    if (output.size() > (1 << 20)) break;
  }
  ::close(from_child[0]);
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) return OracleAnswer::unknown("oracle timed out");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return OracleAnswer::unknown("oracle process failed");

  std::istringstream in(output);
  std::string word;
  in >> word;
  const auto kind = parse_harm_kind(word);
  if (!kind || (word != "HARMFUL" && word != "SAFE" && word != "UNKNOWN")) {
    return OracleAnswer::unknown("unreadable oracle output");
  }
  std::string rest;
  std::getline(in, rest);
  if (!rest.empty() && rest.front() == ' ') rest.erase(0, rest.find_first_not_of(' '));
  OracleAnswer a;
  a.kind = *kind;
  a.justification = rest.empty() ? "external oracle" : rest;
  return a;
}

std::unique_ptr<HarmOracle> make_oracle(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view() : spec.substr(colon + 1);
  const BigNat default_budget = 1'000'000;
  auto budget = [&]() { return arg.empty() ? default_budget : parse_count(arg); };
  if (kind == "simulate") return std::make_unique<BoundedSimulationOracle>(budget());
  if (kind == "deciders") return std::make_unique<DeciderBackedOracle>(budget());
  if (kind == "total") return std::make_unique<TotalHeuristicOracle>(budget());
  if (kind == "always-safe" && arg.empty()) return std::make_unique<ConstantOracle>(HarmKind::Safe);
  if (kind == "always-harmful" && arg.empty()) return std::make_unique<ConstantOracle>(HarmKind::Harmful);
  if (kind == "exec" && !arg.empty()) {
    return std::make_unique<ExternalProcessOracle>(std::string(arg), default_budget, std::chrono::seconds(10));
  }
  throw std::invalid_argument("unknown oracle '" + std::string(spec) + "'");
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void AuditLog::append(AuditRecord r) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(r));
}

std::vector<AuditRecord> AuditLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

void AuditLog::write_jsonl(std::ostream& out) const {
  for (const AuditRecord& r : records()) {
    nlohmann::ordered_json j;
    j["program"] = r.program;
    j["input"] = r.input;
    j["oracle"] = r.oracle;
    j["answer"] = to_string(r.answer);
    j["justification"] = r.justification;
    j["decision"] = r.executed ? "executed" : "disabled";
    j["policy"] = to_string(r.policy);
    j["reason"] = r.reason;
    j["outcome"] = r.outcome ? nlohmann::ordered_json(std::string(to_string(*r.outcome))) : nlohmann::ordered_json();
    j["decided_at"] = r.decided_at;
    out << j.dump() << '\n';
  }
}

GateDecision control_gate(const HarmOracle& oracle, const ContainedProgram& p, const InputWord& w,
                          GatePolicy policy, const RunLimits& run_budget, AuditLog* log) {
  OracleAnswer a;
  try {
    a = oracle.judge(p, w);
  } catch (const std::exception& e) {
    a = OracleAnswer::unknown(std::string("oracle failure: ") + e.what());
  }
  return apply_gate(oracle.name(), std::move(a), p, w, policy, run_budget, log);
}

GateDecision apply_gate(const std::string& oracle, OracleAnswer answer, const ContainedProgram& p,
                        const InputWord& w, GatePolicy policy, const RunLimits& run_budget, AuditLog* log) {
  GateDecision d;
  d.answer = std::move(answer);
  switch (d.answer.kind) {
    case HarmKind::Harmful: d.reason = "harmful"; break;
    case HarmKind::Safe:
      d.executed = true;
      d.reason = "safe";
      break;
    case HarmKind::Unknown:
      d.executed = policy == GatePolicy::FailOpen;
      d.reason = d.executed ? "unknown, fail-open" : "unknown";
      break;
  }
  if (d.executed) d.outcome = run_program(p, w, run_budget);
  if (log) {
    AuditRecord r;
    r.program = p.origin == ProgramOrigin::HaltHarm ? "halt-harm(" + p.source + ", " + p.input.to_string() + ")" : p.source;
    r.input = w.to_string();
    r.oracle = oracle;
    r.answer = d.answer.kind;
    r.justification = d.answer.justification;
    r.executed = d.executed;
    r.policy = policy;
    r.reason = d.reason;
    if (d.outcome) r.outcome = d.outcome->kind;
    r.decided_at = utc_now();
    log->append(std::move(r));
  }
  return d;
}

std::uint64_t Scorecard::total() const {
  return correct_harmful + correct_safe + false_harmful + false_safe + unknown_on_harmful + unknown_on_safe +
         unknown_on_unknown + harmful_on_unknown + safe_on_unknown;
}

namespace {

OracleAnswer safe_judge(const HarmOracle& oracle, const LabeledProgram& item) {
  try {
    return oracle.judge(item.program, item.program.input);
  } catch (const std::exception& e) {
    return OracleAnswer::unknown(std::string("oracle failure: ") + e.what());
  }
}

Scorecard tally(const HarmOracle& oracle, const std::vector<LabeledProgram>& corpus, const std::vector<OracleAnswer>& answers) {
  Scorecard s;
  s.oracle = oracle.name();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const HarmKind truth = corpus[i].truth.kind;
    const HarmKind answer = answers[i].kind;
    s.items.push_back({corpus[i].name, truth, answer, answers[i].justification});
    if (truth == HarmKind::Unknown) {
      if (answer == HarmKind::Harmful) ++s.harmful_on_unknown;
      if (answer == HarmKind::Safe) ++s.safe_on_unknown;
      if (answer == HarmKind::Unknown) ++s.unknown_on_unknown;
    } else if (answer == HarmKind::Unknown) {
      ++(truth == HarmKind::Harmful ? s.unknown_on_harmful : s.unknown_on_safe);
    } else if (answer == truth) {
      ++(truth == HarmKind::Harmful ? s.correct_harmful : s.correct_safe);
    } else {
      ++(answer == HarmKind::Harmful ? s.false_harmful : s.false_safe);
    }
  }
  return s;
}

}  // namespace

Scorecard evaluate_oracle_serial(const HarmOracle& oracle, const std::vector<LabeledProgram>& corpus) {
  std::vector<OracleAnswer> answers;
  answers.reserve(corpus.size());
  for (const auto& item : corpus) answers.push_back(safe_judge(oracle, item));
  return tally(oracle, corpus, answers);
}

Scorecard evaluate_oracle(const HarmOracle& oracle, const std::vector<LabeledProgram>& corpus, int jobs) {
  std::vector<OracleAnswer> answers(corpus.size());
  const auto n = static_cast<std::int64_t>(corpus.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    answers[static_cast<std::size_t>(i)] = safe_judge(oracle, corpus[static_cast<std::size_t>(i)]);
  }
  return tally(oracle, corpus, answers);
}

}  // namespace tmlab
