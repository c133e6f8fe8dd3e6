#include "tmlab/simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace tmlab {

BigNat parse_bignat(std::string_view text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("expected a decimal natural number, got '" + std::string(text) + "'");
  }
  return BigNat(std::string(text));
}

BigNat parse_count(std::string_view text) {
  const auto sep = text.find_first_of("e^");
  if (sep == std::string_view::npos) return parse_bignat(text);
  const BigNat base = parse_bignat(text.substr(0, sep));
  const BigNat exp = parse_bignat(text.substr(sep + 1));
  if (exp > 100'000) throw std::invalid_argument("exponent too large in '" + std::string(text) + "'");
  const auto k = static_cast<unsigned>(exp);
  if (text[sep] == '^') return boost::multiprecision::pow(base, k);
  return base * boost::multiprecision::pow(BigNat(10), k);
}

std::string_view to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Halted: return "Halted";
    case OutcomeKind::StepLimit: return "StepLimit";
    case OutcomeKind::SpaceLimit: return "SpaceLimit";
    case OutcomeKind::TimeLimit: return "TimeLimit";
  }
  return "StepLimit";
}

std::optional<OutcomeKind> parse_outcome_kind(std::string_view s) {
  for (auto k : {OutcomeKind::Halted, OutcomeKind::StepLimit, OutcomeKind::SpaceLimit, OutcomeKind::TimeLimit}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

bool same_observable(const RunOutcome& a, const RunOutcome& b) {
  return a.kind == b.kind && a.steps == b.steps && a.marks == b.marks && a.final_state == b.final_state &&
         a.halt_form == b.halt_form && a.halting_state == b.halting_state && a.head == b.head &&
         a.visited == b.visited && a.tape == b.tape;
}

namespace {

using Clock = std::chrono::steady_clock;

class Deadline {
 public:
  explicit Deadline(const std::optional<std::chrono::milliseconds>& budget) {
    if (budget) end_ = Clock::now() + *budget;
  }
  bool passed() const { return end_ && Clock::now() >= *end_; }

 private:
  std::optional<Clock::time_point> end_;
};

void check_limits(const RunLimits& lim) {
  if (lim.max_steps < 1) throw std::invalid_argument("max-steps must be at least 1");
  if (lim.max_cells < 1) throw std::invalid_argument("max-cells must be at least 1");
}

}  // namespace

RunOutcome run_direct(const Machine& m, const InputWord& w, const RunLimits& lim) {
  check_limits(lim);
  const std::uint64_t max_steps = saturate_u64(lim.max_steps);
  DenseTape tape(w.symbols, static_cast<std::size_t>(lim.max_cells + w.size() + 1));
  const Deadline deadline(lim.wall_clock);

  RunOutcome out;
  StateIndex state = 0;
  std::int64_t head = 0;
  Extent visited;
  visited.include(0);
  std::uint64_t steps = 0;
  while (true) {
    if (steps >= max_steps) {
      out.kind = OutcomeKind::StepLimit;
      break;
    }
    if ((steps & 0xFFFFF) == 0 && steps != 0 && deadline.passed()) {
      out.kind = OutcomeKind::TimeLimit;
      break;
    }
    const auto& t = m.at(state, tape.cell(head));
    ++steps;
    if (!t) {
      out.kind = OutcomeKind::Halted;
      out.halt_form = HaltForm::ViaUndefined;
      out.halting_state = state;
      break;
    }
    tape.write(head, t->write);
    head += static_cast<int>(t->move);
    visited.include(head);
    if (t->halts()) {
      out.kind = OutcomeKind::Halted;
      out.halt_form = HaltForm::ViaZ;
      out.halting_state = state;
      state = kHaltState;
      break;
    }
    state = t->next;
    if (visited.size() > lim.max_cells) {
      out.kind = OutcomeKind::SpaceLimit;
      break;
    }
  }
  out.steps = steps;
  out.iterations = steps;
  out.marks = tape.marks();
  out.final_state = state;
  out.head = head;
  out.visited = visited;
  out.tape = tape.snapshot(lim.snapshot_cap);
  return out;
}

namespace {

// Remaining step allowance, held in 64 bits and refilled from the BigNat
// limit only when the limit does not fit.
class StepWindow {
 public:
  explicit StepWindow(const BigNat& max_steps) : max_(max_steps) { refill(); }

  std::uint64_t left() const { return left_; }
  void consume(std::uint64_t k) {
    counter_.add(k);
    left_ -= k;
    if (left_ < kRefillBelow && !small_) refill();
  }
  const StepCounter& counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kWindow = std::uint64_t{1} << 62;
  static constexpr std::uint64_t kRefillBelow = std::uint64_t{1} << 61;

  void refill() {
    const BigNat rem = max_ - counter_.value();
    small_ = rem <= kWindow;
    left_ = small_ ? static_cast<std::uint64_t>(rem) : kWindow;
  }

  BigNat max_;
  StepCounter counter_;
  std::uint64_t left_ = 0;
  bool small_ = true;
};

}  // namespace

RunOutcome run_accelerated(const Machine& m, const InputWord& w, const RunLimits& lim) {
  check_limits(lim);
  RleTape tape(w.symbols);
  StepWindow window(lim.max_steps);
  const Deadline deadline(lim.wall_clock);
  const auto max_cells = static_cast<std::int64_t>(std::min<std::uint64_t>(lim.max_cells, INT64_MAX / 4));

  RunOutcome out;
  StateIndex state = 0;
  Extent visited;
  visited.include(0);
  std::uint64_t iterations = 0;
  while (true) {
    if (window.left() == 0) {
      out.kind = OutcomeKind::StepLimit;
      break;
    }
    if ((iterations & 0xFFFF) == 0 && iterations != 0 && deadline.passed()) {
      out.kind = OutcomeKind::TimeLimit;
      break;
    }
    ++iterations;
    const auto& t = m.at(state, tape.head_symbol());
    if (!t) {
      window.consume(1);
      out.kind = OutcomeKind::Halted;
      out.halt_form = HaltForm::ViaUndefined;
      out.halting_state = state;
      break;
    }
    const int dir = static_cast<int>(t->move);
    const std::int64_t head = tape.head();
    // Steps until the visited span would first exceed max_cells.
    const std::int64_t to_space = dir > 0 ? visited.lo + max_cells - head : head - visited.hi + max_cells;
    std::uint64_t k = t->next == state ? tape.block_length(dir) : 1;
    k = std::min({k, window.left(), static_cast<std::uint64_t>(to_space)});
    tape.sweep(dir, k, t->write);
    window.consume(k);
    visited.include(tape.head());
    if (t->halts()) {
      out.kind = OutcomeKind::Halted;
      out.halt_form = HaltForm::ViaZ;
      out.halting_state = state;
      state = kHaltState;
      break;
    }
    state = t->next;
    if (static_cast<std::int64_t>(k) == to_space) {
      out.kind = OutcomeKind::SpaceLimit;
      break;
    }
  }
  out.steps = window.counter().value();
  out.iterations = iterations;
  out.marks = tape.marks();
  out.final_state = state;
  out.head = tape.head();
  out.visited = visited;
  out.tape = tape.snapshot(lim.snapshot_cap);
  return out;
}

RunOutcome run(const Machine& m, const InputWord& w, const RunLimits& lim, Engine engine) {
  return engine == Engine::Direct ? run_direct(m, w, lim) : run_accelerated(m, w, lim);
}

std::vector<Configuration> trace(const Machine& m, const InputWord& w, std::size_t k) {
  if (k == 0) throw std::invalid_argument("trace length must be at least 1");
  std::vector<Configuration> out;
  out.push_back(initial_configuration(m, w));
  while (out.size() < k) {
    StepResult r = step(m, out.back());
    if (r.kind == StepKind::HaltedByUndefined) break;
    const bool halted = r.kind == StepKind::HaltedByZ;
    out.push_back(std::move(r.config));
    if (halted) break;
  }
  return out;
}

}  // namespace tmlab
