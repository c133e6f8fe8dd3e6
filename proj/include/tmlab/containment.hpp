// Harm as an observable event, the HaltHarm reduction, harm oracles, the
// control gate and the oracle scorecard.
//
// Harm is entering an appended two-state gadget (G1 writes a mark and moves
// right, G2 writes a mark, moves left and halts). make_halt_harm(T, I)
// redirects every halting transition of T into G1, so the compiled program
// harms exactly when T halts on I, two steps later than T would.

#ifndef TMLAB_CONTAINMENT_HPP_
#define TMLAB_CONTAINMENT_HPP_

#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tmlab/deciders.hpp"

namespace tmlab {

enum class ProgramOrigin { Raw, HaltHarm };
std::string_view to_string(ProgramOrigin o);

struct ContainedProgram {
  Machine machine;
  ProgramOrigin origin = ProgramOrigin::Raw;
  InputWord input;                // I for halt-harm programs
  std::optional<StateIndex> g1;   // gadget states, halt-harm only
  std::optional<StateIndex> g2;
  std::string source;             // text of T, or of the raw machine
};

inline constexpr std::size_t kMaxHaltHarmStates = 23;

// Throws std::invalid_argument when t has more than kMaxHaltHarmStates.
ContainedProgram make_halt_harm(const Machine& t, const InputWord& i);
ContainedProgram make_raw(const Machine& m, const InputWord& input = {});

// Letter text of the program's machine; empty when it has too many states.
std::string program_text(const ContainedProgram& p);

// Runs p on w and sets halted_via_gadget.
RunOutcome run_program(const ContainedProgram& p, const InputWord& w, const RunLimits& lim,
                       Engine engine = Engine::Accelerated);

enum class HarmKind { Harmful, Safe, Unknown };
std::string_view to_string(HarmKind k);
std::optional<HarmKind> parse_harm_kind(std::string_view s);  // also HARMFUL/SAFE/UNKNOWN

struct OracleAnswer {
  HarmKind kind = HarmKind::Unknown;
  std::string justification;
  std::optional<BigNat> steps;             // simulation evidence for Harmful
  std::optional<Certificate> certificate;  // non-halting evidence for Safe

  static OracleAnswer harmful(BigNat steps, std::string why);
  static OracleAnswer safe(std::string why, std::optional<Certificate> c = std::nullopt);
  static OracleAnswer unknown(std::string why);
};
using HarmLabel = OracleAnswer;

// Ground truth, as far as simulation within lim and deciders within
// min(lim, kTruthDeciderSteps) reach: Harmful when the run enters the
// gadget, Safe when a decider certifies it never will (raw programs are
// always Safe), otherwise Unknown.
inline const BigNat kTruthDeciderSteps = 1'000'000;
HarmLabel harm_of(const ContainedProgram& p, const RunLimits& lim, const DeciderOptions& opt = {});

class HarmOracle {
 public:
  virtual ~HarmOracle() = default;
  virtual std::string name() const = 0;
  // May throw; callers treat a throw as Unknown.
  virtual OracleAnswer judge(const ContainedProgram& p, const InputWord& w) const = 0;
};

// Harmful if simulation within the budget enters the gadget, Safe if it
// halts elsewhere, Unknown otherwise.
class BoundedSimulationOracle : public HarmOracle {
 public:
  explicit BoundedSimulationOracle(BigNat budget) : budget_(std::move(budget)) {}
  std::string name() const override;
  OracleAnswer judge(const ContainedProgram& p, const InputWord& w) const override;

 private:
  BigNat budget_;
};

// Bounded simulation plus deciders: Safe only with a certificate.
class DeciderBackedOracle : public HarmOracle {
 public:
  explicit DeciderBackedOracle(BigNat budget, DeciderOptions opt = {}) : budget_(std::move(budget)), opt_(opt) {}
  std::string name() const override;
  OracleAnswer judge(const ContainedProgram& p, const InputWord& w) const override;

 private:
  BigNat budget_;
  DeciderOptions opt_;
};

// Always answers: Harmful if simulation within the budget enters the gadget,
// otherwise Safe.
class TotalHeuristicOracle : public HarmOracle {
 public:
  explicit TotalHeuristicOracle(BigNat budget) : budget_(std::move(budget)) {}
  std::string name() const override;
  OracleAnswer judge(const ContainedProgram& p, const InputWord& w) const override;

 private:
  BigNat budget_;
};

class ConstantOracle : public HarmOracle {
 public:
  explicit ConstantOracle(HarmKind answer) : answer_(answer) {}
  std::string name() const override;
  OracleAnswer judge(const ContainedProgram& p, const InputWord& w) const override;

 private:
  HarmKind answer_;
};

// Runs `/bin/sh -c command` per query. The child reads one line
// "<machine text>\t<input>\t<budget>" on stdin and prints HARMFUL, SAFE or
// UNKNOWN as the first word of its output, optionally followed by
// justification text. Timeouts, crashes, non-zero exits and unreadable
// output are Unknown.
class ExternalProcessOracle : public HarmOracle {
 public:
  ExternalProcessOracle(std::string command, BigNat budget, std::chrono::milliseconds timeout)
      : command_(std::move(command)), budget_(std::move(budget)), timeout_(timeout) {}
  std::string name() const override;
  OracleAnswer judge(const ContainedProgram& p, const InputWord& w) const override;

 private:
  std::string command_;
  BigNat budget_;
  std::chrono::milliseconds timeout_;
};

// Oracle specs accepted by make_oracle: simulate:N, deciders:N, total:N,
// always-safe, always-harmful, exec:COMMAND (budget N=10^6, timeout 10 s).
// Throws std::invalid_argument on anything else.
std::unique_ptr<HarmOracle> make_oracle(std::string_view spec);

enum class GatePolicy { FailClosed, FailOpen };
std::string_view to_string(GatePolicy p);
std::optional<GatePolicy> parse_gate_policy(std::string_view s);

struct AuditRecord {
  std::string program;
  std::string input;
  std::string oracle;
  HarmKind answer = HarmKind::Unknown;
  std::string justification;
  bool executed = false;
  GatePolicy policy = GatePolicy::FailClosed;
  std::string reason;
  std::optional<OutcomeKind> outcome;
  std::string decided_at;  // UTC, ISO 8601
};

// Append-only; safe to share between threads.
class AuditLog {
 public:
  void append(AuditRecord r);
  std::vector<AuditRecord> records() const;
  void write_jsonl(std::ostream& out) const;

 private:
  mutable std::mutex mu_;
  std::vector<AuditRecord> records_;
};

struct GateDecision {
  bool executed = false;
  OracleAnswer answer;
  std::string reason;                // why it was disabled, or "safe"/"fail-open"
  std::optional<RunOutcome> outcome;  // when executed
};

// Harmful is always disabled; Safe runs under run_budget; Unknown is
// disabled under fail-closed and run under fail-open. The decision is
// appended to log when one is given.
GateDecision control_gate(const HarmOracle& oracle, const ContainedProgram& p, const InputWord& w,
                          GatePolicy policy, const RunLimits& run_budget, AuditLog* log = nullptr);
// The same gate for an answer already obtained from the named oracle.
GateDecision apply_gate(const std::string& oracle, OracleAnswer answer, const ContainedProgram& p,
                        const InputWord& w, GatePolicy policy, const RunLimits& run_budget, AuditLog* log = nullptr);

struct LabeledProgram {
  std::string name;
  ContainedProgram program;
  HarmLabel truth;  // from harm_of with a larger budget than any oracle's
};

struct ScoreItem {
  std::string name;
  HarmKind truth = HarmKind::Unknown;
  HarmKind answer = HarmKind::Unknown;
  std::string justification;
};

struct Scorecard {
  std::string oracle;
  std::uint64_t correct_harmful = 0;
  std::uint64_t correct_safe = 0;
  std::uint64_t false_harmful = 0;
  std::uint64_t false_safe = 0;
  std::uint64_t unknown_on_harmful = 0;
  std::uint64_t unknown_on_safe = 0;
  std::uint64_t unknown_on_unknown = 0;
  // Answers on items whose ground truth is itself unknown; not errors.
  std::uint64_t harmful_on_unknown = 0;
  std::uint64_t safe_on_unknown = 0;
  std::vector<ScoreItem> items;  // corpus order

  std::uint64_t errors() const { return false_harmful + false_safe; }
  std::uint64_t unknowns() const { return unknown_on_harmful + unknown_on_safe + unknown_on_unknown; }
  std::uint64_t total() const;
};

// Serial reference.
Scorecard evaluate_oracle_serial(const HarmOracle& oracle, const std::vector<LabeledProgram>& corpus);
// OpenMP over items; identical scorecard.
Scorecard evaluate_oracle(const HarmOracle& oracle, const std::vector<LabeledProgram>& corpus, int jobs = 0);

}  // namespace tmlab

#endif  // TMLAB_CONTAINMENT_HPP_
