#include "tmlab/deciders.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tmlab {

std::string describe(const Certificate& c) {
  std::ostringstream out;
  if (const auto* e = std::get_if<ExactCycle>(&c)) {
    out << "ExactCycle(start=" << e->start << ", period=" << e->period << ")";
  } else if (const auto* t = std::get_if<TranslatedCycle>(&c)) {
    out << "TranslatedCycle(start=" << t->start << ", period=" << t->period << ", offset=" << std::showpos
        << t->offset << ")";
  } else if (const auto* b = std::get_if<BackwardRefutation>(&c)) {
    out << "BackwardRefutation(depth=" << b->depth << ")";
  } else {
    const auto& p = std::get<ClosedPositionSet>(c);
    out << "ClosedPositionSet(gram=" << p.gram << ", modulus=" << p.modulus << ", configs=" << p.configs.size()
        << ", grams=" << p.left_grams.size() << "+" << p.right_grams.size() << ")";
  }
  return out.str();
}

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Halts: return "Halts";
    case VerdictKind::NeverHalts: return "NeverHalts";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(ThresholdKind k) {
  switch (k) {
    case ThresholdKind::Above: return "Above";
    case ThresholdKind::NotAbove: return "NotAbove";
    case ThresholdKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

Verdict Verdict::halts(BigNat steps, std::uint64_t marks) {
  Verdict v;
  v.kind = VerdictKind::Halts;
  v.steps = std::move(steps);
  v.marks = marks;
  return v;
}

Verdict Verdict::never_halts(Certificate c) {
  Verdict v;
  v.kind = VerdictKind::NeverHalts;
  v.certificate = c;
  return v;
}

Verdict Verdict::unknown(BigNat budget) {
  Verdict v;
  v.kind = VerdictKind::Unknown;
  v.budget_spent = std::move(budget);
  return v;
}

// ---------------------------------------------------------------------------
// Certificate replay

namespace {

struct Replay {
  const Machine& m;
  DenseTape tape;
  StateIndex state = 0;
  std::int64_t head = 0;

  Replay(const Machine& machine, const InputWord& w) : m(machine), tape(w.symbols) {}

  // False when the step halts; a halting step invalidates any cycle claim.
  bool advance() {
    const auto& t = m.at(state, tape.cell(head));
    if (!t) return false;
    tape.write(head, t->write);
    head += static_cast<int>(t->move);
    if (t->halts()) return false;
    state = t->next;
    return true;
  }

  bool blank_beyond(int dir) const {
    const Extent& e = tape.extent();
    if (e.empty()) return true;
    if (dir > 0) {
      for (std::int64_t i = head + 1; i <= e.hi; ++i) {
        if (tape.cell(i) != 0) return false;
      }
    } else {
      for (std::int64_t i = e.lo; i < head; ++i) {
        if (tape.cell(i) != 0) return false;
      }
    }
    return true;
  }
};

bool replay_exact(const Machine& m, const InputWord& w, const ExactCycle& c) {
  if (c.period == 0) return false;
  Replay r(m, w);
  for (std::uint64_t i = 0; i < c.start; ++i) {
    if (!r.advance()) return false;
  }
  const StateIndex state = r.state;
  const std::int64_t head = r.head;
  const DenseTape before = r.tape;
  for (std::uint64_t i = 0; i < c.period; ++i) {
    if (!r.advance()) return false;
  }
  return r.state == state && r.head == head && r.tape.same_cells(before);
}

bool replay_translated(const Machine& m, const InputWord& w, const TranslatedCycle& c) {
  if (c.period == 0 || c.offset == 0) return false;
  const int dir = c.offset > 0 ? 1 : -1;
  Replay r(m, w);
  for (std::uint64_t i = 0; i < c.start; ++i) {
    if (!r.advance()) return false;
  }
  if (!r.blank_beyond(dir)) return false;
  const StateIndex state = r.state;
  const std::int64_t head = r.head;
  const DenseTape before = r.tape;
  std::int64_t lo = head, hi = head;
  for (std::uint64_t i = 0; i < c.period; ++i) {
    if (!r.advance()) return false;
    lo = std::min(lo, r.head);
    hi = std::max(hi, r.head);
  }
  if (r.state != state || r.head - head != c.offset || !r.blank_beyond(dir)) return false;
  const std::int64_t from = dir > 0 ? lo : head;
  const std::int64_t to = dir > 0 ? head : hi;
  for (std::int64_t x = from; x <= to; ++x) {
    if (before.cell(x) != r.tape.cell(x + c.offset)) return false;
  }
  return true;
}

bool halting_slot(const Machine& m, StateIndex q, Symbol s) {
  const auto& t = m.at(q, s);
  return !t || t->halts();
}

// Level-by-level predecessor sets; tapes are relative to the head.
bool replay_backward(const Machine& m, const InputWord& w, const BackwardRefutation& c) {
  using Node = std::pair<StateIndex, std::map<std::int64_t, Symbol>>;
  std::set<Node> level;
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    for (Symbol s = 0; s < 2; ++s) {
      if (halting_slot(m, q, s)) level.insert({q, {{0, s}}});
    }
  }
  for (std::uint64_t k = 0; k < c.depth && !level.empty(); ++k) {
    std::set<Node> prev;
    for (const auto& [q, tape] : level) {
      for (StateIndex p = 0; p < m.num_states(); ++p) {
        for (Symbol r = 0; r < 2; ++r) {
          const auto& t = m.at(p, r);
          if (!t || t->halts() || t->next != q) continue;
          const std::int64_t d = static_cast<int>(t->move);
          const auto it = tape.find(-d);
          if (it != tape.end() && it->second != t->write) continue;
          std::map<std::int64_t, Symbol> shifted;
          for (const auto& [x, v] : tape) shifted[x + d] = v;
          shifted[0] = r;
          prev.insert({p, std::move(shifted)});
        }
      }
    }
    level = std::move(prev);
  }
  if (!level.empty()) return false;
  Replay r(m, w);
  for (std::uint64_t i = 0; i < c.depth; ++i) {
    if (!r.advance()) return false;
  }
  return true;
}

// Stacked cells are two characters: symbol, then depth digit.
std::string stacked(char sym, std::uint32_t depth) { return {sym, static_cast<char>('0' + depth)}; }

bool stack_text(const std::string& s, std::size_t cells, std::uint32_t modulus) {
  if (s.size() != 2 * cells) return false;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    const char sym = s[i];
    const int depth = s[i + 1] - '0';
    if (sym != '0' && sym != '1' && sym != '$') return false;
    if (depth < 0 || depth >= static_cast<int>(modulus) || (sym == '$' && depth != 0)) return false;
  }
  return true;
}

// Checks closure directly on the strings.
bool check_closed_positions(const Machine& m, const InputWord& w, const ClosedPositionSet& c) {
  const std::size_t n = c.gram;
  const std::uint32_t k = c.modulus;
  if (n < 2 || k == 0 || k > 10) return false;
  const std::set<std::string> left(c.left_grams.begin(), c.left_grams.end());
  const std::set<std::string> right(c.right_grams.begin(), c.right_grams.end());
  const std::set<LocalConfig> configs(c.configs.begin(), c.configs.end());
  for (const auto* grams : {&left, &right}) {
    for (const auto& g : *grams) {
      if (!stack_text(g, n, k)) return false;
    }
  }
  for (const auto& lc : configs) {
    if (lc.state >= m.num_states() || !stack_text(lc.left, n - 1, k) || !stack_text(lc.right, n - 1, k)) return false;
    if (lc.head != '0' && lc.head != '1' && lc.head != '$') return false;
  }

  // Start: the input occupies the head cell and the right stack.
  std::string bottom;
  for (std::size_t i = 0; i < n; ++i) bottom += stacked('$', 0);
  std::string start_right;
  for (std::size_t i = 1; i < w.size(); ++i) {
    start_right += stacked(static_cast<char>('0' + w.symbols[i]), static_cast<std::uint32_t>((w.size() - i) % k));
  }
  start_right += bottom;
  for (std::size_t i = 0; i + 2 * n <= start_right.size(); i += 2) {
    if (!right.count(start_right.substr(i, 2 * n))) return false;
  }
  if (!left.count(bottom)) return false;
  const char start_head = w.empty() ? '$' : static_cast<char>('0' + w.symbols[0]);
  if (!configs.count(LocalConfig{0, bottom.substr(0, 2 * (n - 1)), start_head, start_right.substr(0, 2 * (n - 1))})) {
    return false;
  }

  for (const auto& lc : configs) {
    const auto& t = m.at(lc.state, lc.head == '1' ? 1 : 0);
    if (!t || t->halts()) return false;
    const bool right_move = t->move == Move::Right;
    const std::string& behind = right_move ? lc.left : lc.right;
    const std::string& ahead = right_move ? lc.right : lc.left;
    const auto& behind_grams = right_move ? left : right;
    const auto& ahead_grams = right_move ? right : left;
    const std::uint32_t depth = (static_cast<std::uint32_t>(behind[1] - '0') + 1) % k;
    const std::string pushed = stacked(static_cast<char>('0' + t->write), depth) + behind;
    if (!behind_grams.count(pushed)) return false;
    for (const auto& g : ahead_grams) {
      if (g.compare(0, ahead.size(), ahead) != 0) continue;
      const std::string popped = g.substr(2);
      const std::string near = pushed.substr(0, 2 * (n - 1));
      LocalConfig next{t->next, right_move ? near : popped, ahead[0], right_move ? popped : near};
      if (!configs.count(next)) return false;
    }
  }
  return true;
}

}  // namespace

bool validate_certificate(const Machine& m, const InputWord& w, const Certificate& c) {
  if (const auto* e = std::get_if<ExactCycle>(&c)) return replay_exact(m, w, *e);
  if (const auto* t = std::get_if<TranslatedCycle>(&c)) return replay_translated(m, w, *t);
  if (const auto* b = std::get_if<BackwardRefutation>(&c)) return replay_backward(m, w, *b);
  return check_closed_positions(m, w, std::get<ClosedPositionSet>(c));
}

// ---------------------------------------------------------------------------
// Shared stepping loop for the detectors

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_key(std::int64_t i) { return mix(static_cast<std::uint64_t>(i) ^ 0x5A5A5A5A00000000ULL); }

enum class Advance { Running, Halted };

struct Detector {
  const Machine& m;
  DenseTape tape;
  StateIndex state = 0;
  std::int64_t head = 0;
  std::uint64_t steps = 0;
  std::uint64_t tape_hash = 0;  // xor of cell_key over marked cells

  Detector(const Machine& machine, const InputWord& w, const RunLimits& lim)
      : m(machine), tape(w.symbols, static_cast<std::size_t>(lim.max_cells + w.size() + 1)) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w.symbols[i]) tape_hash ^= cell_key(static_cast<std::int64_t>(i));
    }
  }

  // Throws SpaceLimitError when the tape budget runs out.
  Advance advance() {
    const Symbol read = tape.cell(head);
    const auto& t = m.at(state, read);
    ++steps;
    if (!t) return Advance::Halted;
    if (t->write != read) tape_hash ^= cell_key(head);
    tape.write(head, t->write);
    head += static_cast<int>(t->move);
    if (t->halts()) {
      state = kHaltState;
      return Advance::Halted;
    }
    state = t->next;
    return Advance::Running;
  }

  std::uint64_t config_key() const {
    return tape_hash ^ mix((static_cast<std::uint64_t>(state) << 48) ^ static_cast<std::uint64_t>(head));
  }
};

}  // namespace

Verdict decide_cyclers(const Machine& m, const InputWord& w, const RunLimits& budget, const DeciderOptions& opt) {
  const std::uint64_t max_steps = saturate_u64(budget.max_steps);
  Detector d(m, w, budget);
  std::unordered_map<std::uint64_t, std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(max_steps, 1 << 16)));
  try {
    while (true) {
      const std::uint64_t key = d.config_key();
      if (seen.size() < opt.max_fingerprints) {
        const auto [it, inserted] = seen.try_emplace(key, d.steps);
        if (!inserted) {
          const ExactCycle c{it->second, d.steps - it->second};
          if (validate_certificate(m, w, c)) return Verdict::never_halts(c);
        }
      } else if (const auto it = seen.find(key); it != seen.end()) {
        const ExactCycle c{it->second, d.steps - it->second};
        if (validate_certificate(m, w, c)) return Verdict::never_halts(c);
      }
      if (d.steps >= max_steps) break;
      if (d.advance() == Advance::Halted) return Verdict::halts(d.steps, d.tape.marks());
    }
  } catch (const SpaceLimitError&) {
  }
  return Verdict::unknown(budget.max_steps);
}

namespace {

// Edge records for one direction. Coordinates are mirrored (x -> dir * x) so
// that both directions look like "new rightmost position".
class EdgeTracker {
 public:
  EdgeTracker(int dir, std::size_t num_states, const DeciderOptions& opt, std::int64_t input_edge)
      : dir_(dir), opt_(opt), input_edge_(input_edge), by_state_(num_states) {}

  // Call once per time step, before the step is taken.
  std::optional<TranslatedCycle> observe(std::uint64_t t, StateIndex state, std::int64_t head,
                                         const DenseTape& tape) {
    const std::int64_t pos = dir_ * head;
    // Maintain minimum mirrored position since each record.
    bool popped = false;
    std::size_t first = 0;
    while (!low_.empty() && low_.back().bound > pos) {
      first = low_.back().first_record;
      low_.pop_back();
      popped = true;
    }
    if (popped) low_.push_back({first, pos});

    const bool fresh = t == 0 || pos > frontier_;
    frontier_ = std::max(frontier_, pos);
    if (!fresh || pos < input_edge_) return std::nullopt;

    std::optional<TranslatedCycle> found;
    for (const std::size_t r_idx : by_state_[state]) {
      const Record& r = records_[r_idx];
      const std::int64_t low = lowest_since(r_idx);
      const auto window = static_cast<std::uint64_t>(r.pos - low + 1);
      if (window > r.behind.size() && !r.complete) continue;
      bool same = true;
      for (std::uint64_t j = 0; j < window && same; ++j) {
        const Symbol a = j < r.behind.size() ? r.behind[j] : 0;
        same = a == tape.cell(dir_ * (pos - static_cast<std::int64_t>(j)));
      }
      if (same) {
        found = TranslatedCycle{r.step, t - r.step, dir_ * (pos - r.pos)};
        break;
      }
    }

    Record rec{t, pos, {}, false};
    const Extent& e = tape.extent();
    const std::int64_t far = e.empty() ? pos : (dir_ > 0 ? e.lo : -e.hi);
    const std::int64_t depth = std::max<std::int64_t>(pos - far + 1, 1);
    const auto keep = static_cast<std::size_t>(std::min<std::int64_t>(depth, static_cast<std::int64_t>(opt_.record_window)));
    rec.complete = static_cast<std::int64_t>(keep) == depth;
    rec.behind.reserve(keep);
    for (std::size_t j = 0; j < keep; ++j) rec.behind.push_back(tape.cell(dir_ * (pos - static_cast<std::int64_t>(j))));
    const std::size_t idx = records_.size();
    records_.push_back(std::move(rec));
    low_.push_back({idx, pos});
    auto& list = by_state_[state];
    list.push_back(idx);
    if (list.size() > opt_.records_per_state) {
      Record& old = records_[list.front()];
      old.behind = {};
      list.pop_front();
    }
    return found;
  }

 private:
  struct Record {
    std::uint64_t step;
    std::int64_t pos;
    std::vector<Symbol> behind;  // tape from the head backwards, nearest first
    bool complete;               // behind reaches past every written cell
  };
  struct LowEntry {
    std::size_t first_record;
    std::int64_t bound;
  };

  std::int64_t lowest_since(std::size_t record) const {
    auto it = std::upper_bound(low_.begin(), low_.end(), record,
                               [](std::size_t r, const LowEntry& e) { return r < e.first_record; });
    return std::prev(it)->bound;
  }

  int dir_;
  const DeciderOptions& opt_;
  std::int64_t input_edge_;
  std::int64_t frontier_ = 0;
  std::vector<Record> records_;
  std::vector<LowEntry> low_;  // increasing first_record and bound
  std::vector<std::deque<std::size_t>> by_state_;
};

}  // namespace

Verdict decide_translated_cyclers(const Machine& m, const InputWord& w, const RunLimits& budget,
                                  const DeciderOptions& opt) {
  const std::uint64_t max_steps = saturate_u64(budget.max_steps);
  Detector d(m, w, budget);
  EdgeTracker right(1, m.num_states(), opt, static_cast<std::int64_t>(w.size()) - 1);
  EdgeTracker left(-1, m.num_states(), opt, 0);
  try {
    while (true) {
      for (EdgeTracker* side : {&right, &left}) {
        if (auto c = side->observe(d.steps, d.state, d.head, d.tape)) {
          if (validate_certificate(m, w, *c)) return Verdict::never_halts(*c);
        }
      }
      if (d.steps >= max_steps) break;
      if (d.advance() == Advance::Halted) return Verdict::halts(d.steps, d.tape.marks());
    }
  } catch (const SpaceLimitError&) {
  }
  return Verdict::unknown(budget.max_steps);
}

namespace {

// Depth-first over backward chains with absolute tape coordinates. Returns the
// longest chain found, or nullopt when a chain reaches the depth limit or the
// node budget runs out.
class BackwardSearch {
 public:
  BackwardSearch(const Machine& m, const DeciderOptions& opt) : m_(m), opt_(opt) {}

  std::optional<std::uint64_t> longest() {
    std::uint64_t best = 0;
    bool any = false;
    for (StateIndex q = 0; q < m_.num_states(); ++q) {
      for (Symbol s = 0; s < 2; ++s) {
        const auto& t = m_.at(q, s);
        if (t && !t->halts()) continue;
        any = true;
        tape_ = {{0, s}};
        const auto len = chain(q, 0, 0);
        if (!len) return std::nullopt;
        best = std::max(best, *len);
      }
    }
    return any ? best + 1 : 0;
  }

 private:
  std::optional<std::uint64_t> chain(StateIndex q, std::int64_t head, std::uint64_t depth) {
    if (depth + 1 >= opt_.backward_depth || ++nodes_ > opt_.backward_nodes) return std::nullopt;
    std::uint64_t best = depth;
    for (StateIndex p = 0; p < m_.num_states(); ++p) {
      for (Symbol r = 0; r < 2; ++r) {
        const auto& t = m_.at(p, r);
        if (!t || t->halts() || t->next != q) continue;
        const std::int64_t from = head - static_cast<int>(t->move);
        const auto it = tape_.find(from);
        if (it != tape_.end() && it->second != t->write) continue;
        const std::optional<Symbol> saved = it == tape_.end() ? std::nullopt : std::optional<Symbol>(it->second);
        tape_[from] = r;
        const auto len = chain(p, from, depth + 1);
        if (saved) {
          tape_[from] = *saved;
        } else {
          tape_.erase(from);
        }
        if (!len) return std::nullopt;
        best = std::max(best, *len);
      }
    }
    return best;
  }

  const Machine& m_;
  const DeciderOptions& opt_;
  std::map<std::int64_t, Symbol> tape_;
  std::size_t nodes_ = 0;
};

}  // namespace

Verdict decide_backward(const Machine& m, const InputWord& w, const DeciderOptions& opt) {
  BackwardSearch search(m, opt);
  if (const auto depth = search.longest()) {
    const BackwardRefutation c{*depth};
    if (validate_certificate(m, w, c)) return Verdict::never_halts(c);
  }
  return Verdict::unknown(0);
}

namespace {

// Stacked cells are packed into one byte each (symbol * 16 + depth), nearest
// cell in the lowest byte.
class PositionSearch {
 public:
  PositionSearch(const Machine& m, const InputWord& w, std::uint32_t gram, std::uint32_t modulus,
                 std::size_t max_configs)
      : m_(m), w_(w), n_(gram), k_(modulus), max_configs_(max_configs) {}

  std::optional<ClosedPositionSet> run() {
    const std::uint64_t bottom = 0x20202020'20202020ULL & mask(n_);
    std::vector<std::uint8_t> right_stack;
    for (std::size_t i = 1; i < w_.size(); ++i) {
      right_stack.push_back(cell(w_.symbols[i], static_cast<std::uint32_t>((w_.size() - i) % k_)));
    }
    for (std::uint32_t i = 0; i < n_; ++i) right_stack.push_back(kBlank);
    for (std::size_t i = 0; i + n_ <= right_stack.size(); ++i) {
      std::uint64_t g = 0;
      for (std::uint32_t j = 0; j < n_; ++j) g |= std::uint64_t{right_stack[i + j]} << (8 * j);
      add_gram(right_, g);
    }
    add_gram(left_, bottom);
    std::uint64_t start_right = 0;
    for (std::uint32_t j = 0; j + 1 < n_; ++j) start_right |= std::uint64_t{right_stack[j]} << (8 * j);
    const std::uint8_t start_head = w_.empty() ? kBlank : cell(w_.symbols[0], 0);
    add({0, start_head, bottom & mask(n_ - 1), start_right});

    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t i = 0; i < order_.size(); ++i) {
        const Local lc = order_[i];
        const auto& t = m_.at(lc.state, (lc.head >> 4) == 1 ? 1 : 0);
        if (!t || t->halts()) return std::nullopt;
        const bool right_move = t->move == Move::Right;
        const std::uint64_t behind = right_move ? lc.left : lc.right;
        const std::uint64_t ahead = right_move ? lc.right : lc.left;
        const std::uint32_t depth = ((behind & 0xF) + 1) % k_;
        const std::uint64_t pushed = cell(t->write, depth) | (behind << 8);
        if (add_gram(right_move ? left_ : right_, pushed)) grew = true;
        const std::uint64_t near = pushed & mask(n_ - 1);
        const Grams& from = right_move ? right_ : left_;
        const auto it = from.next.find(ahead);
        if (it == from.next.end()) continue;
        const std::vector<std::uint8_t> options = it->second;
        for (const std::uint8_t x : options) {
          const std::uint64_t popped = (ahead >> 8) | (std::uint64_t{x} << (8 * (n_ - 2)));
          const auto head = static_cast<std::uint8_t>(ahead & 0xFF);
          const Local next = right_move ? Local{t->next, head, near, popped} : Local{t->next, head, popped, near};
          if (add(next)) grew = true;
          if (order_.size() > max_configs_) return std::nullopt;
        }
      }
    }

    ClosedPositionSet c{n_, k_, {}, {}, {}};
    for (const Local& lc : order_) {
      c.configs.push_back({lc.state, text(lc.left, n_ - 1), sym_char(lc.head), text(lc.right, n_ - 1)});
    }
    std::sort(c.configs.begin(), c.configs.end());
    for (const std::uint64_t g : left_.all) c.left_grams.push_back(text(g, n_));
    for (const std::uint64_t g : right_.all) c.right_grams.push_back(text(g, n_));
    std::sort(c.left_grams.begin(), c.left_grams.end());
    std::sort(c.right_grams.begin(), c.right_grams.end());
    return c;
  }

 private:
  static constexpr std::uint8_t kBlank = 0x20;

  struct Local {
    StateIndex state;
    std::uint8_t head;
    std::uint64_t left, right;
  };
  struct Grams {
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::uint64_t> all;
    std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> next;  // prefix -> far cell
  };

  static std::uint8_t cell(Symbol s, std::uint32_t depth) { return static_cast<std::uint8_t>(s * 16 + depth); }
  static std::uint64_t mask(std::uint32_t cells) { return cells >= 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (8 * cells)) - 1; }
  static char sym_char(std::uint8_t c) { return "01$"[c >> 4]; }
  static std::string text(std::uint64_t v, std::uint32_t cells) {
    std::string s;
    for (std::uint32_t i = 0; i < cells; ++i) {
      const auto c = static_cast<std::uint8_t>(v >> (8 * i));
      s += stacked(sym_char(c), c & 0xF);
    }
    return s;
  }

  bool add_gram(Grams& g, std::uint64_t gram) {
    if (!g.seen.insert(gram).second) return false;
    g.all.push_back(gram);
    g.next[gram & mask(n_ - 1)].push_back(static_cast<std::uint8_t>(gram >> (8 * (n_ - 1))));
    return true;
  }

  bool add(const Local& lc) {
    const std::uint64_t key = std::hash<std::uint64_t>{}(lc.left) * 31 + lc.right;
    auto& bucket = configs_[key ^ (std::uint64_t{lc.state} << 40) ^ (std::uint64_t{lc.head} << 56)];
    for (const std::size_t i : bucket) {
      const Local& o = order_[i];
      if (o.state == lc.state && o.head == lc.head && o.left == lc.left && o.right == lc.right) return false;
    }
    bucket.push_back(order_.size());
    order_.push_back(lc);
    return true;
  }

  const Machine& m_;
  const InputWord& w_;
  std::uint32_t n_, k_;
  std::size_t max_configs_;
  Grams left_, right_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> configs_;
  std::vector<Local> order_;
};

}  // namespace

Verdict decide_closed_positions(const Machine& m, const InputWord& w, const DeciderOptions& opt) {
  const std::uint32_t max_gram = std::min<std::uint32_t>(opt.cps_max_gram, 8);
  const std::uint32_t max_modulus = std::min<std::uint32_t>(opt.cps_max_modulus, 10);
  for (std::uint32_t n = 2; n <= max_gram; ++n) {
    for (std::uint32_t k = 1; k <= max_modulus; ++k) {
      PositionSearch search(m, w, n, k, opt.cps_max_configs);
      if (auto c = search.run()) {
        if (validate_certificate(m, w, *c)) return Verdict::never_halts(std::move(*c));
      }
    }
  }
  return Verdict::unknown(0);
}

Verdict decide_all(const Machine& m, const InputWord& w, const RunLimits& budget, const DeciderOptions& opt) {
  // Budgets grow tenfold so that easy certificates come cheap; the
  // extensions do not depend on the budget and run once, after 10^4.
  auto simulate = [&](const BigNat& steps) {
    RunLimits lim = budget;
    lim.max_steps = steps;
    Verdict v = decide_cyclers(m, w, lim, opt);
    if (v.kind != VerdictKind::Unknown) return v;
    return decide_translated_cyclers(m, w, lim, opt);
  };
  BigNat steps = std::min<BigNat>(budget.max_steps, 1'000);
  bool extended = !opt.extensions;
  for (;;) {
    Verdict v = simulate(steps);
    if (v.kind != VerdictKind::Unknown) return v;
    if (!extended && (steps >= 10'000 || steps == budget.max_steps)) {
      extended = true;
      for (auto* extension : {&decide_backward, &decide_closed_positions}) {
        Verdict e = extension(m, w, opt);
        if (e.kind == VerdictKind::NeverHalts) return e;
      }
    }
    if (steps == budget.max_steps) return v;
    steps = std::min<BigNat>(budget.max_steps, steps * 10);
  }
}

ThresholdAnswer busy_beaver_threshold(const Machine& m, std::uint64_t k, const RunLimits& budget) {
  ThresholdAnswer a;
  const RunOutcome run = run_accelerated(m, {}, budget);
  if (run.halted()) {
    a.kind = run.marks > k ? ThresholdKind::Above : ThresholdKind::NotAbove;
    a.evidence = Verdict::halts(run.steps, run.marks);
    return a;
  }
  a.evidence = decide_all(m, {}, budget);
  if (a.evidence.kind == VerdictKind::NeverHalts) {
    a.kind = ThresholdKind::NotAbove;
  } else {
    a.kind = ThresholdKind::Unknown;
    a.evidence = Verdict::unknown(budget.max_steps);
  }
  return a;
}

}  // namespace tmlab
