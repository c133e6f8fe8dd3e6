// One-sided procedures for four undecidable properties of machines, with
// acceptance read as halting.
//
//   emptiness    "does m accept any input?"       ProvedYes with a halting witness
//   all-strings  "does m reject some input?"      ProvedYes with a non-halting certificate
//   password     "does m accept exactly one?"     ProvedNo with two halting witnesses
//   equivalence  "do m1, m2 halt on the same?"    ProvedNo with a halt/never-halt witness
//
// Nothing else is ever proved. Inputs are tried in length-lexicographic order
// over words with no trailing blank ("", "1", "01", "11", "001", ...), since a
// trailing 0 writes the same tape as the shorter word. Step budgets start at
// start_steps and double each round up to max_steps.

#ifndef TMLAB_RICE_HPP_
#define TMLAB_RICE_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmlab/deciders.hpp"

namespace tmlab {

enum class RiceProblem { Emptiness, AllStrings, Password, Equivalence };
std::string_view to_string(RiceProblem p);
std::optional<RiceProblem> parse_rice_problem(std::string_view s);

enum class RiceKind { ProvedYes, ProvedNo, Unknown };
std::string_view to_string(RiceKind k);

struct RiceBudget {
  std::size_t max_word_length = 4;
  BigNat start_steps = 16;
  BigNat max_steps = 100'000;
  DeciderOptions deciders;
  int jobs = 0;  // <= 0: OpenMP default; 1: serial
};

// One piece of evidence about one machine on one input.
struct RiceWitness {
  InputWord word;
  std::size_t machine = 0;              // 0 or 1 (equivalence)
  std::optional<BigNat> halt_steps;     // halts in exactly this many steps
  std::optional<Certificate> certificate;  // never halts
};

struct RiceVerdict {
  RiceProblem problem = RiceProblem::Emptiness;
  RiceKind kind = RiceKind::Unknown;
  std::vector<RiceWitness> witnesses;
  // Budgets actually exhausted.
  std::size_t word_length = 0;
  std::size_t words_tried = 0;
  BigNat steps = 0;
  std::string note;
};

std::vector<InputWord> candidate_words(std::size_t max_length);

RiceVerdict semi_decide_emptiness(const Machine& m, const RiceBudget& b = {});
RiceVerdict semi_decide_all_strings(const Machine& m, const RiceBudget& b = {});
RiceVerdict semi_decide_password(const Machine& m, const RiceBudget& b = {});
RiceVerdict semi_decide_equivalence(const Machine& m1, const Machine& m2, const RiceBudget& b = {});

// Replays every witness independently; Unknown verdicts replay trivially.
// m2 is only used for equivalence.
bool replay(const RiceVerdict& v, const Machine& m1, const Machine* m2 = nullptr);

// True when the verdict's kind is one its problem can soundly prove.
bool one_sided(const RiceVerdict& v);

}  // namespace tmlab

#endif  // TMLAB_RICE_HPP_
