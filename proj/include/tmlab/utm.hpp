// A universal Turing machine, built as a machine over a 16-symbol working
// alphabet and compiled down to an ordinary two-symbol Machine.
//
// Working symbols, by code: _ a b A B # $ S M K L R i j h u. Each is stored
// as a block of four binary cells, most significant bit first, so '_' is the
// blank block. The encoded tape (see docs/formats.md) is
//
//   # S e0 e1 S e0 e1 ... $ x0 x1 ...
//
// with one "S e0 e1" group per simulated state, entries e = (a|b)(L|R)(i^(t+1)|h)
// or u for undefined, and the simulated input with its head cell in upper
// case. While running, a binary step counter grows to the left of '#'
// (digits a/b, least significant next to '#').

#ifndef TMLAB_UTM_HPP_
#define TMLAB_UTM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmlab/simulator.hpp"

namespace tmlab {

// A machine over symbols 0..num_symbols-1 (0 is blank).
struct MultiTransition {
  std::uint8_t write = 0;
  Move move = Move::Right;
  StateIndex next = kHaltState;
};

class MultiMachine {
 public:
  explicit MultiMachine(unsigned num_symbols);

  unsigned num_symbols() const { return symbols_; }
  std::size_t num_states() const { return table_.size(); }
  const std::string& name(StateIndex q) const { return names_[q]; }

  StateIndex add_state(std::string name);
  void set(StateIndex q, std::uint8_t read, MultiTransition t);
  const std::optional<MultiTransition>& at(StateIndex q, std::uint8_t read) const {
    return table_[q][read];
  }

 private:
  unsigned symbols_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::optional<MultiTransition>>> table_;
};

// Reference stepper over working symbols; returns the number of steps taken
// (an undefined transition counts as a step) and leaves the tape, head and
// state in place. Stops after max_steps.
struct MultiRun {
  bool halted = false;
  std::uint64_t steps = 0;
  StateIndex state = 0;
  std::int64_t head = 0;
  std::int64_t origin = 0;  // tape index of cells[0]
  std::vector<std::uint8_t> cells;
};
MultiRun run_multi(const MultiMachine& m, std::vector<std::uint8_t> tape, std::uint64_t max_steps);

// Two-symbol machine in which every working cell is a block of `bits` binary
// cells, head on the first of them. One working step takes 3*bits-2 binary
// steps (2*bits-1 when it halts); working state q starts at binary state
// entry_state(q, bits).
Machine compile_to_binary(const MultiMachine& m, unsigned bits = 4);
inline StateIndex entry_state(StateIndex q, unsigned bits = 4) {
  return static_cast<StateIndex>(q * ((1u << bits) - 1));
}
InputWord blocks_to_binary(const std::vector<std::uint8_t>& cells, unsigned bits = 4);

inline constexpr std::string_view kUtmAlphabet = "_abAB#$SMKLRijhu";

const MultiMachine& universal_multi_machine();
const Machine& universal_machine();

struct UtmEncoding {
  InputWord tape;                    // binary, four cells per working symbol
  std::vector<std::uint8_t> blocks;  // the same tape as working symbol codes
};

// Throws std::invalid_argument for machines with no states or more than 26.
UtmEncoding encode(const Machine& m, const InputWord& w);
// Throws FormatError when the tape is not an encoding.
std::pair<Machine, InputWord> decode(const UtmEncoding& enc);
std::string encoding_text(const UtmEncoding& enc);  // working symbols as letters

// Runs universal_machine() on the encoded tape. The snapshot cap is raised
// so that the whole final tape is kept.
RunOutcome run_via_utm(const UtmEncoding& enc, const RunLimits& lim);

// Simulated run read back off the universal machine's final tape. Cells are
// trimmed to the outermost marks and the head is relative to the first of
// them (0 on a blank tape), so runs compare independently of translation.
struct UtmRecovery {
  bool halted = false;
  BigNat steps = 0;
  std::uint64_t marks = 0;
  std::int64_t head = 0;
  std::vector<Symbol> cells;
};
// Throws FormatError when the snapshot is missing, truncated or malformed.
UtmRecovery recover(const RunOutcome& utm_run);

// Direct outcome in the same translation-free form, for comparison.
UtmRecovery recovery_of(const RunOutcome& direct);
bool same_recovery(const UtmRecovery& a, const UtmRecovery& b);

}  // namespace tmlab

#endif  // TMLAB_UTM_HPP_
