// Exhaustive enumeration of n-state machines in tree normal form, classified
// by simulation and the bundled deciders.
//
// Tree normal form: for n >= 2 the first transition is fixed to 1RB; every
// other transition is left undefined until the simulation first reads it,
// and new states are introduced in first-use order. Reaching an undefined
// transition yields one halting leaf (the transition becomes 1RZ) and, if
// another undefined slot would remain, one child per possible definition.

#ifndef TMLAB_ENUMERATE_HPP_
#define TMLAB_ENUMERATE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmlab/deciders.hpp"

namespace tmlab {

struct EnumerationOptions {
  RunLimits budget = RunLimits::steps(100'000);
  DeciderOptions deciders;
  int jobs = 0;  // <= 0: OpenMP default
  bool keep_leaves = false;

  EnumerationOptions() { budget.max_cells = 1 << 20; }
};

struct Leaf {
  std::string text;
  Machine machine;
  Verdict verdict;  // Halts, NeverHalts or Unknown (holdout)
};

struct EnumerationReport {
  std::size_t states = 0;
  std::uint64_t sigma = 0;  // max marks over machines proven to halt
  std::uint64_t s = 0;      // max steps over machines proven to halt
  std::vector<std::string> champions;       // reach sigma
  std::vector<std::string> step_champions;  // reach s
  std::vector<std::string> holdouts;
  std::uint64_t halting = 0;
  std::uint64_t nonhalting = 0;
  BigNat budget = 0;
  std::vector<Leaf> leaves;  // sorted by text; only with keep_leaves

  // sigma and s are exact only when no holdouts remain.
  bool closed() const { return holdouts.empty(); }
};

// Serial reference.
EnumerationReport enumerate_serial(std::size_t n, const EnumerationOptions& opt = {});
// OpenMP kernel over subtrees; identical report for any thread count.
EnumerationReport enumerate(std::size_t n, const EnumerationOptions& opt = {});

}  // namespace tmlab

#endif  // TMLAB_ENUMERATE_HPP_
