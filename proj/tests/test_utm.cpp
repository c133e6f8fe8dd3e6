// Universal machine: encoding, block compilation and agreement with direct
// runs.

#include "doctest.h"

#include <random>
#include <set>

#include "support.hpp"
#include "tmlab/enumerate.hpp"
#include "tmlab/format.hpp"
#include "tmlab/utm.hpp"

using namespace tmlab;

namespace {

Symbol snapshot_cell(const TapeSnapshot& t, std::int64_t x) {
  if (x < t.origin || x >= t.origin + static_cast<std::int64_t>(t.cells.size())) return 0;
  return t.cells[static_cast<std::size_t>(x - t.origin)];
}

MultiMachine random_multi(std::mt19937_64& rng, std::size_t states, unsigned symbols) {
  MultiMachine m(symbols);
  for (std::size_t q = 0; q < states; ++q) m.add_state("q" + std::to_string(q));
  for (StateIndex q = 0; q < states; ++q) {
    for (unsigned s = 0; s < symbols; ++s) {
      const StateIndex next = rng() % 8 == 0 ? kHaltState : static_cast<StateIndex>(rng() % states);
      m.set(q, static_cast<std::uint8_t>(s),
            MultiTransition{static_cast<std::uint8_t>(rng() % symbols), (rng() & 1) ? Move::Right : Move::Left, next});
    }
  }
  return m;
}

void check_agreement(const Machine& m, const InputWord& w) {
  const RunLimits lim = RunLimits::steps(50'000'000);
  const RunOutcome d = run_direct(m, w, lim);
  REQUIRE(d.halted());
  const RunOutcome u = run_via_utm(encode(m, w), lim);
  REQUIRE_MESSAGE(u.halted(), serialize_machine(m));
  const UtmRecovery r = recover(u);
  REQUIRE_MESSAGE(same_recovery(r, recovery_of(d)), serialize_machine(m) << " on " << w.to_string());
  CHECK(r.steps == d.steps);
  CHECK(r.marks == d.marks);
}

}  // namespace

TEST_CASE("encode and decode are inverse") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const Machine m = tmtest::random_machine(rng, 1 + rng() % 8, 0.15, 0.1);
    const InputWord w = tmtest::random_word(rng, 8);
    const auto [m2, w2] = decode(encode(m, w));
    REQUIRE(m2 == m);
    REQUIRE(w2.to_string() == w.to_string());
  }
}

TEST_CASE("encoding is injective on a sample") {
  std::mt19937_64 rng(32);
  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> encodings;
  for (int i = 0; i < 2000; ++i) {
    const Machine m = tmtest::random_machine(rng, 1 + rng() % 3, 0.2, 0.2);
    const InputWord w = tmtest::random_word(rng, 3);
    if (!pairs.emplace(serialize_machine(m), w.to_string()).second) continue;
    REQUIRE(encodings.insert(encoding_text(encode(m, w))).second);
  }
}

TEST_CASE("encode rejects machines outside its range") {
  CHECK_THROWS_AS(encode(Machine(0), {}), std::invalid_argument);
  CHECK_THROWS_AS(encode(Machine(27), {}), std::invalid_argument);
  UtmEncoding bad;
  bad.blocks = {1, 2, 3};
  bad.tape = blocks_to_binary(bad.blocks);
  CHECK_THROWS_AS(decode(bad), FormatError);
}

TEST_CASE("block compilation preserves runs and step counts") {
  std::mt19937_64 rng(33);
  for (unsigned bits : {2U, 3U, 4U}) {
    for (int i = 0; i < 60; ++i) {
      const unsigned symbols = 2 + static_cast<unsigned>(rng() % ((1U << bits) - 1));
      const MultiMachine mm = random_multi(rng, 1 + rng() % 4, symbols);
      std::vector<std::uint8_t> tape(rng() % 5);
      for (auto& c : tape) c = static_cast<std::uint8_t>(rng() % symbols);
      const MultiRun ref = run_multi(mm, tape, 300);

      const Machine bin = compile_to_binary(mm, bits);
      RunLimits lim = RunLimits::steps(BigNat(300) * (3 * bits - 2));
      const RunOutcome o = run_direct(bin, blocks_to_binary(tape, bits), lim);
      REQUIRE(o.halted() == ref.halted);
      const std::uint64_t per = 3 * bits - 2;
      const BigNat expect = ref.halted ? BigNat(ref.steps - 1) * per + (2 * bits - 1) : BigNat(ref.steps) * per;
      REQUIRE(o.steps == expect);
      REQUIRE(o.tape);
      for (std::size_t k = 0; k < ref.cells.size(); ++k) {
        unsigned code = 0;
        const std::int64_t cell = (ref.origin + static_cast<std::int64_t>(k)) * bits;
        for (unsigned b = 0; b < bits; ++b) code = code * 2 + snapshot_cell(*o.tape, cell + b);
        REQUIRE(code == ref.cells[k]);
      }
    }
  }
}

TEST_CASE("single-transition halter through the universal machine") {
  const Machine h = parse_machine("1RZ---");
  const RunOutcome u = run_via_utm(encode(h, {}), RunLimits::steps(1'000'000));
  REQUIRE(u.halted());
  const UtmRecovery r = recover(u);
  CHECK(r.halted);
  CHECK(r.steps == 1);
  CHECK(r.marks == 1);
}

TEST_CASE("bouncer under the universal machine never finishes") {
  const RunOutcome u = run_via_utm(encode(parse_machine("0RB---_0LA---"), {}), RunLimits::steps(2'000'000));
  CHECK(u.kind == OutcomeKind::StepLimit);
}

TEST_CASE("known champions agree") {
  check_agreement(parse_machine("1RB1LB_1LA1RZ"), {});
  check_agreement(parse_machine("1RB1RZ_1LB0RC_1LC1LA"), {});
  check_agreement(parse_machine("1RB1LB_1LA0LC_1RZ1LD_1RD0RA"), {});
}

TEST_CASE("halting corpus agrees through the universal machine") {
  EnumerationOptions o;
  o.keep_leaves = true;
  const auto rep = enumerate(3, o);
  std::vector<const Leaf*> halters;
  for (const Leaf& l : rep.leaves) {
    if (l.verdict.kind == VerdictKind::Halts) halters.push_back(&l);
  }
  REQUIRE(halters.size() > 60);
  std::size_t checked = 0;
  const std::size_t stride = halters.size() / 60;
  for (std::size_t i = 0; i < halters.size(); i += stride, ++checked) check_agreement(halters[i]->machine, {});
  CHECK(checked >= 50);

  std::mt19937_64 rng(34);
  std::size_t with_input = 0;
  while (with_input < 20) {
    const Machine m = tmtest::random_machine(rng, 2 + rng() % 3, 0.1, 0.2);
    const InputWord w = tmtest::random_word(rng, 5);
    const RunOutcome d = run_direct(m, w, RunLimits::steps(2'000));
    if (!d.halted()) continue;
    check_agreement(m, w);
    ++with_input;
  }
}
