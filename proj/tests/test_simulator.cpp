// Direct and accelerated steppers against each other and the naive oracle.

#include "doctest.h"

#include <random>

#include "support.hpp"
#include "tmlab/batch.hpp"
#include "tmlab/enumerate.hpp"
#include "tmlab/format.hpp"

using namespace tmlab;

namespace {
const char* const kChampion5 = "1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA";
}

TEST_CASE("champion-5 under both steppers") {
  const Machine m = parse_machine(kChampion5);
  const RunOutcome d = run_direct(m, {});
  const RunOutcome a = run_accelerated(m, {});
  CHECK(d.kind == OutcomeKind::Halted);
  CHECK(d.steps == 47'176'870);
  CHECK(d.marks == 4'098);
  CHECK(same_observable(d, a));
  CHECK(a.iterations < d.iterations);
}

TEST_CASE("small fixed outcomes") {
  const RunOutcome h = run_direct(parse_machine("1RZ---"), {});
  CHECK(h.kind == OutcomeKind::Halted);
  CHECK(h.steps == 1);
  CHECK(h.marks == 1);

  const RunOutcome u = run_direct(parse_machine("------"), {});
  CHECK(u.kind == OutcomeKind::Halted);
  CHECK(u.halt_form == HaltForm::ViaUndefined);
  CHECK(u.steps == 1);
  CHECK(u.marks == 0);

  for (Engine e : {Engine::Direct, Engine::Accelerated}) {
    const RunOutcome r = run(parse_machine("1RA1RA"), {}, RunLimits::steps(1'000'000), e);
    CHECK(r.kind == OutcomeKind::StepLimit);
    CHECK(r.steps == 1'000'000);
  }
}

TEST_CASE("space limit and time limit") {
  RunLimits lim = RunLimits::steps(1'000'000);
  lim.max_cells = 100;
  for (Engine e : {Engine::Direct, Engine::Accelerated}) {
    const RunOutcome r = run(parse_machine("1RA1RA"), {}, lim, e);
    CHECK(r.kind == OutcomeKind::SpaceLimit);
  }
  RunLimits slow = RunLimits::steps(BigNat(1) << 80);
  slow.wall_clock = std::chrono::milliseconds(50);
  const RunOutcome t = run_direct(parse_machine("0RB---_0LA---"), {}, slow);
  CHECK(t.kind == OutcomeKind::TimeLimit);
}

TEST_CASE("accelerated stepper sweeps blank runs whole") {
  RunLimits lim = RunLimits::steps(BigNat(1) << 40);
  lim.max_cells = std::numeric_limits<std::uint64_t>::max();
  const RunOutcome r = run_accelerated(parse_machine("0RA0RA"), {}, lim);
  CHECK(r.kind == OutcomeKind::StepLimit);
  CHECK(r.steps == (BigNat(1) << 40));
  CHECK(r.iterations < 10);
}

TEST_CASE("trace") {
  const auto t1 = trace(parse_machine(kChampion5), {}, 1);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].state == 0);
  CHECK(t1[0].tape.marks() == 0);
  CHECK(trace(parse_machine("1RZ---"), {}, 10).size() == 2);

  const Machine m = parse_machine("1RB1LB_1LA1RZ");
  const auto t = trace(m, {}, 5);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) CHECK(step(m, t[i]).config == t[i + 1]);
}

TEST_CASE("full 2-state enumeration: steppers agree with each other and with the naive oracle") {
  EnumerationOptions o;
  o.keep_leaves = true;
  const auto rep = enumerate_serial(2, o);
  REQUIRE(!rep.leaves.empty());
  for (const Leaf& l : rep.leaves) {
    for (const char* in : {"", "1", "011"}) {
      const InputWord w = InputWord::from_string(in);
      const RunLimits lim = RunLimits::steps(100'000);
      const RunOutcome d = run_direct(l.machine, w, lim);
      const RunOutcome a = run_accelerated(l.machine, w, lim);
      REQUIRE(same_observable(d, a));
      const auto n = tmtest::naive_run(l.machine, w, 100'000);
      REQUIRE(d.halted() == n.halted);
      REQUIRE(d.steps == n.steps);
      if (d.kind != OutcomeKind::SpaceLimit) REQUIRE(d.marks == n.marks);
    }
  }
}

TEST_CASE("fuzzed machines: steppers agree field-exactly") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Machine m = tmtest::random_machine(rng, 2 + rng() % 4, 0.05, 0.05);
    const InputWord w = tmtest::random_word(rng, 6);
    const RunLimits lim = RunLimits::steps(100'000);
    const RunOutcome d = run_direct(m, w, lim);
    const RunOutcome a = run_accelerated(m, w, lim);
    REQUIRE_MESSAGE(same_observable(d, a), serialize_machine(m) << " on " << w.to_string());
    const auto n = tmtest::naive_run(m, w, 100'000);
    REQUIRE(d.steps == n.steps);
    REQUIRE(d.marks == n.marks);
  }
}

TEST_CASE("batch kernel matches its serial reference") {
  std::mt19937_64 rng(12);
  std::vector<BatchItem> items;
  for (int i = 0; i < 200; ++i) items.push_back({tmtest::random_machine(rng, 4), tmtest::random_word(rng, 4)});
  const RunLimits lim = RunLimits::steps(20'000);
  for (Engine e : {Engine::Direct, Engine::Accelerated}) {
    const auto serial = run_batch_serial(items, lim, e);
    const auto parallel = run_batch(items, lim, e, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) REQUIRE(same_observable(serial[i], parallel[i]));
  }
}

TEST_CASE("counts parse in several spellings") {
  CHECK(parse_count("1000000") == 1'000'000);
  CHECK(parse_count("1e6") == 1'000'000);
  CHECK(parse_count("10^6") == 1'000'000);
  CHECK_THROWS(parse_count("-3"));
  CHECK_THROWS(parse_count("abc"));
  StepCounter c;
  c.add(std::numeric_limits<std::uint64_t>::max());
  c.add(2);
  CHECK(c.value() == BigNat(std::numeric_limits<std::uint64_t>::max()) + 2);
}
