// Sound, certificate-producing halting deciders for restricted classes, and
// the busy-beaver threshold question. Cyclers and translated cyclers are the
// core; backward refutation and closed position sets are extensions that can
// be switched off.
//
// A NeverHalts verdict always carries a certificate that validate_certificate
// replays from scratch; Unknown is never evidence of anything.

#ifndef TMLAB_DECIDERS_HPP_
#define TMLAB_DECIDERS_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tmlab/simulator.hpp"

namespace tmlab {

// Configuration at step start+period equals configuration at step start.
struct ExactCycle {
  std::uint64_t start = 0;
  std::uint64_t period = 0;
  friend bool operator==(const ExactCycle&, const ExactCycle&) = default;
};

// At steps start and start+period the head stands on a fresh edge of the
// tape (nothing but blanks beyond it in the direction of offset), in the same
// state, and the cells it visits in between read identically once shifted by
// offset. Offset is nonzero.
struct TranslatedCycle {
  std::uint64_t start = 0;
  std::uint64_t period = 0;
  std::int64_t offset = 0;
  friend bool operator==(const TranslatedCycle&, const TranslatedCycle&) = default;
};

// Every chain of transitions leading backwards into a halting slot dies out
// before reaching depth steps, and the run does not halt within depth steps.
struct BackwardRefutation {
  std::uint64_t depth = 0;
  friend bool operator==(const BackwardRefutation&, const BackwardRefutation&) = default;
};

// Closed position set over the two half-tapes seen as stacks (nearest cell
// first). Each stacked cell is a symbol '0', '1' or '$' (never visited)
// followed by its depth mod modulus counted from the unvisited end ('$'
// cells have depth 0). The configurations hold the gram-1 nearest cells of
// each stack around the head; the gram sets hold every run of gram cells
// that may occur in the left or right stack. The set contains the start,
// no halting slot, and is closed under one machine step.
struct LocalConfig {
  StateIndex state = 0;
  std::string left;
  char head = '$';
  std::string right;
  friend auto operator<=>(const LocalConfig&, const LocalConfig&) = default;
};

struct ClosedPositionSet {
  std::uint32_t gram = 0;
  std::uint32_t modulus = 1;
  std::vector<LocalConfig> configs;
  std::vector<std::string> left_grams;
  std::vector<std::string> right_grams;
  friend bool operator==(const ClosedPositionSet&, const ClosedPositionSet&) = default;
};

using Certificate = std::variant<ExactCycle, TranslatedCycle, BackwardRefutation, ClosedPositionSet>;

std::string describe(const Certificate& c);

enum class VerdictKind { Halts, NeverHalts, Unknown };
std::string_view to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  BigNat steps = 0;  // Halts
  std::uint64_t marks = 0;  // Halts
  std::optional<Certificate> certificate;  // NeverHalts
  BigNat budget_spent = 0;  // step budget exhausted, for Unknown

  static Verdict halts(BigNat steps, std::uint64_t marks);
  static Verdict never_halts(Certificate c);
  static Verdict unknown(BigNat budget);
};

// Independent replay with a plain dense-tape stepper.
bool validate_certificate(const Machine& m, const InputWord& w, const Certificate& c);

struct DeciderOptions {
  // Cap on stored configuration fingerprints (cyclers).
  std::size_t max_fingerprints = std::size_t{1} << 22;
  // Tape cells kept behind the head at each edge record (translated cyclers).
  std::size_t record_window = 4096;
  // Earlier same-state records compared against each new record.
  std::size_t records_per_state = 256;
  // Run the extension deciders in decide_all.
  bool extensions = true;
  // Backward search limits.
  std::uint64_t backward_depth = 64;
  std::size_t backward_nodes = 100'000;
  // Closed position sets: largest gram length (at most 8) and modulus tried,
  // and cap on local configurations.
  std::uint32_t cps_max_gram = 5;
  std::uint32_t cps_max_modulus = 3;
  std::size_t cps_max_configs = 1 << 14;
};

Verdict decide_cyclers(const Machine& m, const InputWord& w, const RunLimits& budget,
                       const DeciderOptions& opt = {});
Verdict decide_translated_cyclers(const Machine& m, const InputWord& w, const RunLimits& budget,
                                  const DeciderOptions& opt = {});
Verdict decide_backward(const Machine& m, const InputWord& w, const DeciderOptions& opt = {});
Verdict decide_closed_positions(const Machine& m, const InputWord& w, const DeciderOptions& opt = {});
// Simulation with cyclers, then translated cyclers, then (with extensions)
// backward refutation and closed position sets.
Verdict decide_all(const Machine& m, const InputWord& w, const RunLimits& budget, const DeciderOptions& opt = {});

inline Verdict decide_cyclers(const Machine& m, const RunLimits& budget) { return decide_cyclers(m, {}, budget); }
inline Verdict decide_translated_cyclers(const Machine& m, const RunLimits& budget) {
  return decide_translated_cyclers(m, {}, budget);
}

enum class ThresholdKind { Above, NotAbove, Unknown };
std::string_view to_string(ThresholdKind k);

struct ThresholdAnswer {
  ThresholdKind kind = ThresholdKind::Unknown;
  // Halts evidence, a NeverHalts certificate, or the spent budget.
  Verdict evidence;
};

// "Does m, started on a blank tape, halt with more than k marks?" Strict.
// Certified non-halters are NotAbove: they are outside the halting class.
ThresholdAnswer busy_beaver_threshold(const Machine& m, std::uint64_t k, const RunLimits& budget);

}  // namespace tmlab

#endif  // TMLAB_DECIDERS_HPP_
