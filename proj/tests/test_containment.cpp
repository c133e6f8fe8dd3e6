// Halt-harm reduction, oracles, the control gate and scorecards.

#include "doctest.h"

#include <random>
#include <sstream>

#include "json.hpp"

#include "support.hpp"
#include "tmlab/containment.hpp"
#include "tmlab/format.hpp"

using namespace tmlab;

namespace {

const char* const kChampion5 = "1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA";
const char* const kHoldout = "1RB1RD_1LC0RC_1RA1LD_0RE0LB_---1RC";

GateDecision gate(const HarmOracle& o, const char* text, GatePolicy policy, AuditLog* log = nullptr) {
  const ContainedProgram p = make_halt_harm(parse_machine(text), {});
  return control_gate(o, p, {}, policy, RunLimits::steps(100'000), log);
}

std::vector<LabeledProgram> small_corpus() {
  std::vector<LabeledProgram> out;
  std::mt19937_64 rng(41);
  for (int i = 0; i < 120; ++i) {
    const Machine t = tmtest::random_machine(rng, 2 + rng() % 3, 0.1, 0.1);
    const InputWord w = tmtest::random_word(rng, 3);
    LabeledProgram lp;
    lp.name = "p" + std::to_string(i);
    lp.program = make_halt_harm(t, w);
    lp.truth = harm_of(lp.program, RunLimits::steps(200'000));
    out.push_back(std::move(lp));
  }
  return out;
}

}  // namespace

TEST_CASE("halt-harm harms exactly when the source halts, two steps later") {
  std::mt19937_64 rng(40);
  std::size_t halting = 0, running = 0;
  for (int i = 0; i < 400; ++i) {
    const Machine t = tmtest::random_machine(rng, 1 + rng() % 5, 0.1, 0.1);
    const InputWord w = tmtest::random_word(rng, 5);
    const ContainedProgram p = make_halt_harm(t, w);
    const auto src = tmtest::naive_run(t, w, 10'000);
    const RunOutcome r = run_program(p, w, RunLimits::steps(10'002));
    if (src.halted) {
      ++halting;
      REQUIRE(r.halted_via_gadget);
      REQUIRE(r.steps == src.steps + 2);
    } else {
      ++running;
      REQUIRE_FALSE(r.halted_via_gadget);
      REQUIRE_FALSE(r.halted());
    }
  }
  CHECK(halting >= 50);
  CHECK(running >= 50);
  CHECK(make_halt_harm(parse_machine("1RZ---"), {}).machine.num_states() == 3);
  CHECK_THROWS_AS(make_halt_harm(Machine(kMaxHaltHarmStates + 1), {}), std::invalid_argument);
}

TEST_CASE("ground truth labels") {
  const RunLimits lim = RunLimits::steps(100'000'000);
  const HarmLabel h = harm_of(make_halt_harm(parse_machine("1RZ---"), {}), lim);
  CHECK(h.kind == HarmKind::Harmful);
  CHECK(h.steps == BigNat(3));
  CHECK(harm_of(make_halt_harm(parse_machine("0RB---_0LA---"), {}), lim).kind == HarmKind::Safe);
  CHECK(harm_of(make_halt_harm(parse_machine("1RA1RA"), {}), lim).kind == HarmKind::Safe);
  CHECK(harm_of(make_halt_harm(parse_machine(kHoldout), {}), RunLimits::steps(2'000'000)).kind == HarmKind::Unknown);
  const HarmLabel c5 = harm_of(make_halt_harm(parse_machine(kChampion5), {}), lim);
  CHECK(c5.kind == HarmKind::Harmful);
  CHECK(c5.steps == BigNat(47'176'872));
  CHECK(harm_of(make_raw(parse_machine("1RZ---")), lim).kind == HarmKind::Safe);
}

TEST_CASE("oracles answer within their budgets") {
  const ContainedProgram c5 = make_halt_harm(parse_machine(kChampion5), {});
  CHECK(TotalHeuristicOracle(1'000'000).judge(c5, {}).kind == HarmKind::Safe);
  CHECK(BoundedSimulationOracle(1'000'000).judge(c5, {}).kind == HarmKind::Unknown);
  CHECK(DeciderBackedOracle(1'000'000).judge(c5, {}).kind == HarmKind::Unknown);
  CHECK(BoundedSimulationOracle(100'000'000).judge(c5, {}).kind == HarmKind::Harmful);

  const ContainedProgram bouncer = make_halt_harm(parse_machine("0RB---_0LA---"), {});
  const OracleAnswer a = DeciderBackedOracle(1'000'000).judge(bouncer, {});
  CHECK(a.kind == HarmKind::Safe);
  REQUIRE(a.certificate);
  CHECK(validate_certificate(bouncer.machine, {}, *a.certificate));
  CHECK(BoundedSimulationOracle(1'000'000).judge(bouncer, {}).kind == HarmKind::Unknown);

  CHECK(make_oracle("always-safe")->judge(c5, {}).kind == HarmKind::Safe);
  CHECK(make_oracle("always-harmful")->judge(bouncer, {}).kind == HarmKind::Harmful);
  CHECK_THROWS_AS(make_oracle("psychic"), std::invalid_argument);
  CHECK_THROWS_AS(make_oracle("simulate:x"), std::invalid_argument);
}

TEST_CASE("external process oracle") {
  const ContainedProgram h = make_halt_harm(parse_machine("1RZ---"), {});
  const ExternalProcessOracle yes("read l; echo HARMFUL it halts", 1000, std::chrono::milliseconds(5000));
  const OracleAnswer a = yes.judge(h, {});
  CHECK(a.kind == HarmKind::Harmful);
  CHECK(a.justification.find("it halts") != std::string::npos);
  CHECK(ExternalProcessOracle("echo SAFE", 1000, std::chrono::milliseconds(5000)).judge(h, {}).kind == HarmKind::Safe);
  CHECK(ExternalProcessOracle("echo safe", 1000, std::chrono::milliseconds(5000)).judge(h, {}).kind ==
        HarmKind::Unknown);
  CHECK(ExternalProcessOracle("echo SAFE; exit 3", 1000, std::chrono::milliseconds(5000)).judge(h, {}).kind ==
        HarmKind::Unknown);
  CHECK(ExternalProcessOracle("echo maybe", 1000, std::chrono::milliseconds(5000)).judge(h, {}).kind ==
        HarmKind::Unknown);
  CHECK(ExternalProcessOracle("sleep 5", 1000, std::chrono::milliseconds(200)).judge(h, {}).kind ==
        HarmKind::Unknown);
  // The query line carries the program text.
  const ExternalProcessOracle echo("read l; echo UNKNOWN \"$l\"", 77, std::chrono::milliseconds(5000));
  CHECK(echo.judge(h, {}).justification.find(program_text(h)) != std::string::npos);
}

TEST_CASE("control gate") {
  const DeciderBackedOracle dec(1'000'000);
  AuditLog log;

  const GateDecision b = gate(dec, "0RB---_0LA---", GatePolicy::FailClosed, &log);
  CHECK(b.executed);
  REQUIRE(b.outcome);
  CHECK(b.outcome->kind == OutcomeKind::StepLimit);

  const GateDecision h = gate(dec, "1RZ---", GatePolicy::FailOpen, &log);
  CHECK_FALSE(h.executed);
  CHECK(h.answer.kind == HarmKind::Harmful);

  const GateDecision u = gate(dec, kHoldout, GatePolicy::FailClosed, &log);
  CHECK_FALSE(u.executed);
  CHECK(u.answer.kind == HarmKind::Unknown);
  const GateDecision o = gate(dec, kHoldout, GatePolicy::FailOpen, &log);
  CHECK(o.executed);

  // A throwing oracle counts as Unknown.
  struct Broken : HarmOracle {
    std::string name() const override { return "broken"; }
    OracleAnswer judge(const ContainedProgram&, const InputWord&) const override { throw std::runtime_error("boom"); }
  };
  const GateDecision x = gate(Broken{}, "1RZ---", GatePolicy::FailClosed, &log);
  CHECK_FALSE(x.executed);
  CHECK(x.answer.kind == HarmKind::Unknown);

  // A Safe answer on a harmful program executes it, and the run shows harm.
  const GateDecision lie = gate(ConstantOracle(HarmKind::Safe), "1RZ---", GatePolicy::FailClosed, &log);
  CHECK(lie.executed);
  REQUIRE(lie.outcome);
  CHECK(lie.outcome->halted_via_gadget);

  REQUIRE(log.records().size() == 6);
  std::ostringstream out;
  log.write_jsonl(out);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"program", "input", "oracle", "answer", "justification", "decision", "policy", "reason",
                            "outcome", "decided_at"}) {
      CHECK(j.contains(key));
    }
    ++n;
  }
  CHECK(n == 6);
}

TEST_CASE("scorecards") {
  const auto corpus = small_corpus();
  const TotalHeuristicOracle total(5);
  const DeciderBackedOracle dec(10'000);
  for (const HarmOracle* o : std::initializer_list<const HarmOracle*>{&total, &dec}) {
    const Scorecard a = evaluate_oracle_serial(*o, corpus);
    const Scorecard b = evaluate_oracle(*o, corpus, 3);
    CHECK(a.total() == corpus.size());
    CHECK(a.correct_harmful == b.correct_harmful);
    CHECK(a.correct_safe == b.correct_safe);
    CHECK(a.false_safe == b.false_safe);
    CHECK(a.false_harmful == b.false_harmful);
    CHECK(a.unknowns() == b.unknowns());
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) CHECK(a.items[i].answer == b.items[i].answer);
  }
  const Scorecard d = evaluate_oracle(dec, corpus);
  CHECK(d.errors() == 0);
  const Scorecard t = evaluate_oracle(total, corpus);
  CHECK(t.unknowns() == 0);
  CHECK(t.false_safe > 0);
}

TEST_CASE("label parsing") {
  CHECK(parse_harm_kind("HARMFUL") == HarmKind::Harmful);
  CHECK(parse_harm_kind("Safe") == HarmKind::Safe);
  CHECK_FALSE(parse_harm_kind("nope"));
  CHECK(parse_gate_policy("fail-open") == GatePolicy::FailOpen);
}
