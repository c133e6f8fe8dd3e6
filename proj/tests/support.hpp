// Test-only oracles: a deliberately naive stepper over a std::map tape and
// random machine generators. Nothing here shares code with the library's
// steppers.

#ifndef TMLAB_TESTS_SUPPORT_HPP_
#define TMLAB_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "tmlab/machine.hpp"

namespace tmtest {

struct NaiveResult {
  bool halted = false;
  std::uint64_t steps = 0;
  std::uint64_t marks = 0;
  std::int64_t head = 0;
};

inline NaiveResult naive_run(const tmlab::Machine& m, const tmlab::InputWord& w, std::uint64_t max_steps) {
  std::map<std::int64_t, int> tape;
  for (std::size_t i = 0; i < w.symbols.size(); ++i) {
    if (w.symbols[i]) tape[static_cast<std::int64_t>(i)] = 1;
  }
  NaiveResult r;
  unsigned state = 0;
  while (r.steps < max_steps) {
    const auto it = tape.find(r.head);
    const int read = it == tape.end() ? 0 : it->second;
    const auto& t = m.at(static_cast<tmlab::StateIndex>(state), static_cast<tmlab::Symbol>(read));
    ++r.steps;
    if (!t) {
      r.halted = true;
      break;
    }
    if (t->write) {
      tape[r.head] = 1;
    } else {
      tape.erase(r.head);
    }
    r.head += t->move == tmlab::Move::Right ? 1 : -1;
    if (t->next == tmlab::kHaltState) {
      r.halted = true;
      break;
    }
    state = t->next;
  }
  r.marks = tape.size();
  return r;
}

// Each slot: undefined with probability p_undef, else a transition whose
// target is Z with probability p_halt.
inline tmlab::Machine random_machine(std::mt19937_64& rng, std::size_t n, double p_undef = 0.1,
                                     double p_halt = 0.1) {
  std::uniform_real_distribution<double> u(0, 1);
  tmlab::Machine m(n);
  for (tmlab::StateIndex q = 0; q < n; ++q) {
    for (tmlab::Symbol s = 0; s < 2; ++s) {
      if (u(rng) < p_undef) continue;
      const tmlab::StateIndex next =
          u(rng) < p_halt ? tmlab::kHaltState : static_cast<tmlab::StateIndex>(rng() % n);
      m.set(q, s,
            tmlab::Transition{static_cast<tmlab::Symbol>(rng() & 1), (rng() & 1) ? tmlab::Move::Right : tmlab::Move::Left,
                              next});
    }
  }
  return m;
}

inline tmlab::InputWord random_word(std::mt19937_64& rng, std::size_t max_len) {
  tmlab::InputWord w;
  const std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) w.symbols.push_back(static_cast<tmlab::Symbol>(rng() & 1));
  return w;
}

// Slot options for brute force: index 0 is undefined, then write x move x
// target over n states plus Z.
inline std::size_t slot_options(std::size_t n) { return 1 + 4 * (n + 1); }

inline void set_slot(tmlab::Machine& m, tmlab::StateIndex q, tmlab::Symbol s, std::size_t code, std::size_t n) {
  if (code == 0) {
    m.clear(q, s);
    return;
  }
  --code;
  const auto write = static_cast<tmlab::Symbol>(code & 1);
  const auto move = (code >> 1) & 1 ? tmlab::Move::Right : tmlab::Move::Left;
  const std::size_t target = code >> 2;
  m.set(q, s, tmlab::Transition{write, move, target == n ? tmlab::kHaltState : static_cast<tmlab::StateIndex>(target)});
}

// Machine number k of the n-state brute-force space (all slots free).
inline tmlab::Machine brute_machine(std::size_t n, std::uint64_t k) {
  tmlab::Machine m(n);
  const std::size_t opts = slot_options(n);
  for (tmlab::StateIndex q = 0; q < n; ++q) {
    for (tmlab::Symbol s = 0; s < 2; ++s) {
      set_slot(m, q, s, k % opts, n);
      k /= opts;
    }
  }
  return m;
}

struct Best {
  std::uint64_t sigma = 0;
  std::uint64_t s = 0;
};

// Array stepper for brute force; returns false when the budget runs out or
// the head leaves the window.
inline bool quick_halts(const tmlab::Machine& m, std::uint64_t budget, std::uint64_t& steps, std::uint64_t& marks) {
  std::array<std::uint8_t, 2048> tape{};
  std::size_t head = 1024;
  unsigned state = 0;
  steps = 0;
  while (steps < budget) {
    const auto& t = m.at(static_cast<tmlab::StateIndex>(state), tape[head]);
    ++steps;
    if (!t) break;
    tape[head] = t->write;
    head += t->move == tmlab::Move::Right ? 1 : -1;
    if (head == 0 || head + 1 == tape.size()) return false;
    if (t->halts()) break;
    state = t->next;
  }
  if (steps == budget && m.at(static_cast<tmlab::StateIndex>(state), tape[head])) return false;
  marks = 0;
  for (auto c : tape) marks += c;
  return true;
}

inline Best brute_force_2() {
  Best b;
  const std::uint64_t opts = slot_options(2);
  const std::uint64_t total = opts * opts * opts * opts;
  for (std::uint64_t k = 0; k < total; ++k) {
    const tmlab::Machine m = brute_machine(2, k);
    std::uint64_t steps = 0, marks = 0;
    if (!quick_halts(m, 1000, steps, marks)) continue;
    b.sigma = std::max(b.sigma, marks);
    b.s = std::max(b.s, steps);
  }
  return b;
}

// Every 3-state machine up to renaming and mirroring: (A,0) is undefined,
// halts, or goes right to B (going to A on a blank tape never halts).
inline Best brute_force_3() {
  const std::uint64_t opts = slot_options(3);
  std::uint64_t rest = 1;
  for (int i = 0; i < 5; ++i) rest *= opts;
  std::uint64_t sigma = 1, s = 1;
  const auto total = static_cast<std::int64_t>(2 * rest);
#pragma omp parallel for reduction(max : sigma, s) schedule(static, 4096)
  for (std::int64_t k = 0; k < total; ++k) {
    tmlab::Machine m(3);
    m.set(0, 0, tmlab::Transition{static_cast<tmlab::Symbol>(k / static_cast<std::int64_t>(rest)), tmlab::Move::Right, 1});
    std::uint64_t code = static_cast<std::uint64_t>(k) % rest;
    for (int slot = 1; slot < 6; ++slot) {
      set_slot(m, static_cast<tmlab::StateIndex>(slot / 2), static_cast<tmlab::Symbol>(slot % 2), code % opts, 3);
      code /= opts;
    }
    std::uint64_t steps = 0, marks = 0;
    if (!quick_halts(m, 500, steps, marks)) continue;
    sigma = std::max(sigma, marks);
    s = std::max(s, steps);
  }
  return {sigma, s};
}

}  // namespace tmtest

#endif  // TMLAB_TESTS_SUPPORT_HPP_
