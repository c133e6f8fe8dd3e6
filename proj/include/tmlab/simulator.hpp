// Direct and run-length-accelerated simulation.
//
// Both steppers share one observable contract: the same outcome kind, step
// count, mark count, final head and tape for every run that completes. A
// transition into Z counts as one step (its write and move take effect); an
// undefined transition also counts as one step but changes nothing.
//
// Space is bounded by the span of head positions visited (cell 0 is always
// visited). A step that leaves the machine halted reports Halted; otherwise
// a span over max_cells reports SpaceLimit, and then reaching max_steps
// reports StepLimit.

#ifndef TMLAB_SIMULATOR_HPP_
#define TMLAB_SIMULATOR_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tmlab/bignat.hpp"
#include "tmlab/machine.hpp"
#include "tmlab/tape.hpp"

namespace tmlab {

inline const BigNat kDefaultMaxSteps = 100'000'000;
inline constexpr std::uint64_t kDefaultMaxCells = std::uint64_t{1} << 26;

struct RunLimits {
  BigNat max_steps = kDefaultMaxSteps;  // >= 1
  std::uint64_t max_cells = kDefaultMaxCells;
  std::optional<std::chrono::milliseconds> wall_clock;
  std::size_t snapshot_cap = kDefaultSnapshotCap;

  static RunLimits steps(const BigNat& n) {
    RunLimits lim;
    lim.max_steps = n;
    return lim;
  }
};

enum class OutcomeKind { Halted, StepLimit, SpaceLimit, TimeLimit };
enum class HaltForm { None, ViaZ, ViaUndefined };

std::string_view to_string(OutcomeKind k);
std::optional<OutcomeKind> parse_outcome_kind(std::string_view s);

struct RunOutcome {
  OutcomeKind kind = OutcomeKind::StepLimit;
  BigNat steps = 0;
  std::uint64_t marks = 0;
  StateIndex final_state = 0;  // kHaltState after a Z transition
  HaltForm halt_form = HaltForm::None;
  // State whose transition ended the run, when halted.
  std::optional<StateIndex> halting_state;
  // Set by the containment layer for compiled programs; false otherwise.
  bool halted_via_gadget = false;
  std::int64_t head = 0;
  Extent visited;
  std::optional<TapeSnapshot> tape;
  // Loop iterations actually executed (equals steps for the direct stepper).
  std::uint64_t iterations = 0;

  bool halted() const { return kind == OutcomeKind::Halted; }
};

// Field-exact comparison of the observable contract (kind, steps, marks,
// final state, head, tape); iteration counts are ignored.
bool same_observable(const RunOutcome& a, const RunOutcome& b);

RunOutcome run_direct(const Machine& m, const InputWord& w, const RunLimits& lim = {});
RunOutcome run_accelerated(const Machine& m, const InputWord& w, const RunLimits& lim = {});

// First k configurations, fewer if the machine halts earlier (a Z transition
// contributes its final configuration; an undefined one contributes none).
std::vector<Configuration> trace(const Machine& m, const InputWord& w, std::size_t k);

enum class Engine { Direct, Accelerated };
RunOutcome run(const Machine& m, const InputWord& w, const RunLimits& lim, Engine engine);

}  // namespace tmlab

#endif  // TMLAB_SIMULATOR_HPP_
