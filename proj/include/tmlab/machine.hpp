// Two-symbol Turing machine model and single-step semantics.

#ifndef TMLAB_MACHINE_HPP_
#define TMLAB_MACHINE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmlab/tape.hpp"

namespace tmlab {

enum class Move : std::int8_t { Left = -1, Right = 1 };

using StateIndex = std::uint16_t;

// The distinguished halt state Z. Never a row of the transition table.
inline constexpr StateIndex kHaltState = 0xFFFF;
inline constexpr std::size_t kMaxStates = 0xFFFE;

struct Transition {
  Symbol write = 0;
  Move move = Move::Right;
  StateIndex next = kHaltState;

  bool halts() const { return next == kHaltState; }
  friend bool operator==(const Transition&, const Transition&) = default;
};

// Partial transition table over states 0..n-1 (A, B, ...) and symbols {0, 1}.
class Machine {
 public:
  Machine() = default;
  explicit Machine(std::size_t num_states);

  std::size_t num_states() const { return table_.size(); }

  const std::optional<Transition>& at(StateIndex state, Symbol symbol) const {
    return table_[state][symbol];
  }
  // Throws std::out_of_range if state or next-state is not a listed state.
  void set(StateIndex state, Symbol symbol, Transition t);
  void clear(StateIndex state, Symbol symbol);

  std::size_t defined_count() const;
  // Appends an empty row and returns its index.
  StateIndex add_state();

  friend bool operator==(const Machine&, const Machine&) = default;

 private:
  std::vector<std::array<std::optional<Transition>, 2>> table_;
};

// Finite input written from cell 0; the empty word is the blank tape.
struct InputWord {
  std::vector<Symbol> symbols;

  InputWord() = default;
  explicit InputWord(std::vector<Symbol> s) : symbols(std::move(s)) {}

  // Accepts a string over {0,1}; "" is the empty word. Throws
  // std::invalid_argument on any other character.
  static InputWord from_string(std::string_view text);
  std::string to_string() const;
  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }

  friend bool operator==(const InputWord&, const InputWord&) = default;
  friend auto operator<=>(const InputWord& a, const InputWord& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.symbols <=> b.symbols;
  }
};

struct Configuration {
  StateIndex state = 0;
  std::int64_t head = 0;
  DenseTape tape;

  bool halted() const { return state == kHaltState; }
  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.state == b.state && a.head == b.head && a.tape.same_cells(b.tape);
  }
};

enum class StepKind { Next, HaltedByZ, HaltedByUndefined };

struct StepResult {
  StepKind kind;
  // Successor for Next; post-write/move configuration (state Z) for
  // HaltedByZ; the unchanged input configuration for HaltedByUndefined.
  Configuration config;
};

Configuration initial_configuration(const Machine& m, const InputWord& w);

// Precondition: !c.halted(). Pure.
StepResult step(const Machine& m, const Configuration& c);

char state_letter(StateIndex state);

}  // namespace tmlab

#endif  // TMLAB_MACHINE_HPP_
