#include "tmlab/rice.hpp"

#include <omp.h>

#include <algorithm>

namespace tmlab {

std::string_view to_string(RiceProblem p) {
  switch (p) {
    case RiceProblem::Emptiness: return "emptiness";
    case RiceProblem::AllStrings: return "all-strings";
    case RiceProblem::Password: return "password";
    case RiceProblem::Equivalence: return "equivalence";
  }
  return "emptiness";
}

std::optional<RiceProblem> parse_rice_problem(std::string_view s) {
  for (RiceProblem p : {RiceProblem::Emptiness, RiceProblem::AllStrings, RiceProblem::Password,
                        RiceProblem::Equivalence}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

std::string_view to_string(RiceKind k) {
  switch (k) {
    case RiceKind::ProvedYes: return "ProvedYes";
    case RiceKind::ProvedNo: return "ProvedNo";
    case RiceKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::vector<InputWord> candidate_words(std::size_t max_length) {
  std::vector<InputWord> out{InputWord{}};
  for (std::size_t len = 1; len <= max_length; ++len) {
    // Prefixes of length len-1 in lexicographic order, then a final 1.
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (len - 1)); ++bits) {
      std::vector<Symbol> s(len, 1);
      for (std::size_t i = 0; i + 1 < len; ++i) s[i] = static_cast<Symbol>((bits >> (len - 2 - i)) & 1);
      out.emplace_back(std::move(s));
    }
  }
  return out;
}

namespace {

int threads_for(const RiceBudget& b) { return b.jobs > 0 ? b.jobs : omp_get_max_threads(); }

// Budgets of the doubling schedule, ending exactly at max_steps.
std::vector<BigNat> schedule(const RiceBudget& b) {
  std::vector<BigNat> out;
  BigNat s = std::max<BigNat>(1, std::min(b.start_steps, b.max_steps));
  while (s < b.max_steps) {
    out.push_back(s);
    s *= 2;
  }
  out.push_back(b.max_steps);
  return out;
}

// Halting step counts within budget, for the words still open.
void halting_round(const Machine& m, const std::vector<InputWord>& words, const BigNat& budget,
                   std::vector<std::optional<BigNat>>& halts, int threads) {
  const auto n = static_cast<std::int64_t>(words.size());
  const RunLimits lim = RunLimits::steps(budget);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    auto& h = halts[static_cast<std::size_t>(i)];
    if (h) continue;
    const RunOutcome o = run_accelerated(m, words[static_cast<std::size_t>(i)], lim);
    if (o.halted()) h = o.steps;
  }
}

// Non-halting certificates within budget for the selected words. The
// extension deciders do not depend on the step budget, so they only run the
// first time a word is tried.
void certify_round(const Machine& m, const std::vector<InputWord>& words, const BigNat& budget,
                   const std::vector<char>& wanted, std::vector<char>& tried,
                   std::vector<std::optional<Certificate>>& certs, const DeciderOptions& opt, int threads) {
  const auto n = static_cast<std::int64_t>(words.size());
  const RunLimits lim = RunLimits::steps(budget);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!wanted[k] || certs[k]) continue;
    DeciderOptions o = opt;
    o.extensions = opt.extensions && !tried[k];
    tried[k] = 1;
    const Verdict v = decide_all(m, words[k], lim, o);
    if (v.kind == VerdictKind::NeverHalts) certs[k] = v.certificate;
  }
}

RiceVerdict unknown(RiceProblem p, const RiceBudget& b, std::size_t words, std::string note) {
  RiceVerdict v;
  v.problem = p;
  v.word_length = b.max_word_length;
  v.words_tried = words;
  v.steps = b.max_steps;
  v.note = std::move(note);
  return v;
}

RiceVerdict proved(RiceProblem p, RiceKind k, std::vector<RiceWitness> w, std::size_t len, std::size_t words,
                   const BigNat& steps) {
  RiceVerdict v;
  v.problem = p;
  v.kind = k;
  v.witnesses = std::move(w);
  v.word_length = len;
  v.words_tried = words;
  v.steps = steps;
  return v;
}

}  // namespace

RiceVerdict semi_decide_emptiness(const Machine& m, const RiceBudget& b) {
  const auto words = candidate_words(b.max_word_length);
  std::vector<std::optional<BigNat>> halts(words.size());
  for (const BigNat& s : schedule(b)) {
    halting_round(m, words, s, halts, threads_for(b));
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (halts[i]) {
        return proved(RiceProblem::Emptiness, RiceKind::ProvedYes, {RiceWitness{words[i], 0, halts[i], {}}},
                      b.max_word_length, words.size(), s);
      }
    }
  }
  return unknown(RiceProblem::Emptiness, b, words.size(), "no input halts within budget");
}

RiceVerdict semi_decide_all_strings(const Machine& m, const RiceBudget& b) {
  const auto words = candidate_words(b.max_word_length);
  std::vector<std::optional<Certificate>> certs(words.size());
  std::vector<char> wanted(words.size(), 1), tried(words.size(), 0);
  for (const BigNat& s : schedule(b)) {
    certify_round(m, words, s, wanted, tried, certs, b.deciders, threads_for(b));
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (certs[i]) {
        return proved(RiceProblem::AllStrings, RiceKind::ProvedYes, {RiceWitness{words[i], 0, {}, certs[i]}},
                      b.max_word_length, words.size(), s);
      }
    }
  }
  return unknown(RiceProblem::AllStrings, b, words.size(), "no input certified non-halting within budget");
}

RiceVerdict semi_decide_password(const Machine& m, const RiceBudget& b) {
  const auto words = candidate_words(b.max_word_length);
  std::vector<std::optional<BigNat>> halts(words.size());
  for (const BigNat& s : schedule(b)) {
    halting_round(m, words, s, halts, threads_for(b));
    std::vector<RiceWitness> found;
    for (std::size_t i = 0; i < words.size() && found.size() < 2; ++i) {
      if (halts[i]) found.push_back(RiceWitness{words[i], 0, halts[i], {}});
    }
    if (found.size() == 2) {
      return proved(RiceProblem::Password, RiceKind::ProvedNo, std::move(found), b.max_word_length, words.size(), s);
    }
  }
  RiceVerdict v = unknown(RiceProblem::Password, b, words.size(), "fewer than two halting inputs within budget");
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (halts[i]) {
      v.witnesses.push_back(RiceWitness{words[i], 0, halts[i], {}});
      v.note = "exactly one halting input within budget: \"" + words[i].to_string() + "\"";
    }
  }
  return v;
}

RiceVerdict semi_decide_equivalence(const Machine& m1, const Machine& m2, const RiceBudget& b) {
  const auto words = candidate_words(b.max_word_length);
  const std::size_t n = words.size();
  const Machine* ms[2] = {&m1, &m2};
  std::vector<std::optional<BigNat>> halts[2] = {std::vector<std::optional<BigNat>>(n),
                                                 std::vector<std::optional<BigNat>>(n)};
  std::vector<std::optional<Certificate>> certs[2] = {std::vector<std::optional<Certificate>>(n),
                                                      std::vector<std::optional<Certificate>>(n)};
  std::vector<char> tried[2] = {std::vector<char>(n, 0), std::vector<char>(n, 0)};
  for (const BigNat& s : schedule(b)) {
    for (int k = 0; k < 2; ++k) halting_round(*ms[k], words, s, halts[k], threads_for(b));
    for (int k = 0; k < 2; ++k) {
      // Certify k where only the other machine halts.
      std::vector<char> wanted(n, 0);
      for (std::size_t i = 0; i < n; ++i) wanted[i] = halts[1 - k][i] && !halts[k][i];
      certify_round(*ms[k], words, s, wanted, tried[k], certs[k], b.deciders, threads_for(b));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < 2; ++k) {
        if (halts[1 - k][i] && certs[k][i]) {
          std::vector<RiceWitness> w{RiceWitness{words[i], static_cast<std::size_t>(1 - k), halts[1 - k][i], {}},
                                     RiceWitness{words[i], static_cast<std::size_t>(k), {}, certs[k][i]}};
          std::sort(w.begin(), w.end(), [](const RiceWitness& a, const RiceWitness& b2) { return a.machine < b2.machine; });
          return proved(RiceProblem::Equivalence, RiceKind::ProvedNo, std::move(w), b.max_word_length, n, s);
        }
      }
    }
  }
  RiceVerdict v = unknown(RiceProblem::Equivalence, b, n, "no difference found within budget");
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 2; ++k) {
      if (halts[k][i] && !halts[1 - k][i]) {
        if (v.witnesses.empty()) {
          v.note = "machine " + std::to_string(k + 1) + " halts on \"" + words[i].to_string() + "\" in " +
                   to_decimal(*halts[k][i]) + " steps; machine " + std::to_string(2 - k) +
                   " neither halts nor is certified within budget";
        }
        v.witnesses.push_back(RiceWitness{words[i], static_cast<std::size_t>(k), halts[k][i], {}});
      }
    }
  }
  return v;
}

namespace {

bool replay_one(const RiceWitness& w, const Machine& m) {
  if (w.halt_steps) {
    if (w.certificate) return false;
    const RunOutcome o = run_direct(m, w.word, RunLimits::steps(*w.halt_steps));
    return o.halted() && o.steps == *w.halt_steps;
  }
  return w.certificate && validate_certificate(m, w.word, *w.certificate);
}

}  // namespace

bool replay(const RiceVerdict& v, const Machine& m1, const Machine* m2) {
  for (const RiceWitness& w : v.witnesses) {
    if (w.machine > 1 || (w.machine == 1 && !m2)) return false;
    if (!replay_one(w, w.machine == 0 ? m1 : *m2)) return false;
  }
  if (v.kind == RiceKind::Unknown) return true;
  const auto& w = v.witnesses;
  switch (v.problem) {
    case RiceProblem::Emptiness:
      return w.size() == 1 && w[0].halt_steps;
    case RiceProblem::AllStrings:
      return w.size() == 1 && w[0].certificate;
    case RiceProblem::Password:
      return w.size() == 2 && w[0].halt_steps && w[1].halt_steps && w[0].word != w[1].word;
    case RiceProblem::Equivalence:
      return w.size() == 2 && w[0].word == w[1].word && w[0].machine != w[1].machine &&
             (w[0].halt_steps.has_value() != w[1].halt_steps.has_value());
  }
  return false;
}

bool one_sided(const RiceVerdict& v) {
  switch (v.problem) {
    case RiceProblem::Emptiness:
    case RiceProblem::AllStrings:
      return v.kind != RiceKind::ProvedNo;
    case RiceProblem::Password:
    case RiceProblem::Equivalence:
      return v.kind != RiceKind::ProvedYes;
  }
  return false;
}

}  // namespace tmlab
