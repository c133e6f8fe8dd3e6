#include "tmlab/utm.hpp"

#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "tmlab/format.hpp"

namespace tmlab {

MultiMachine::MultiMachine(unsigned num_symbols) : symbols_(num_symbols) {
  if (num_symbols < 2 || num_symbols > 256) throw std::invalid_argument("symbol count must be between 2 and 256");
}

StateIndex MultiMachine::add_state(std::string name) {
  if (table_.size() >= kMaxStates) throw std::length_error("too many states");
  names_.push_back(std::move(name));
  table_.emplace_back(symbols_);
  return static_cast<StateIndex>(table_.size() - 1);
}

void MultiMachine::set(StateIndex q, std::uint8_t read, MultiTransition t) {
  if (q >= table_.size() || read >= symbols_ || t.write >= symbols_) throw std::out_of_range("transition outside table");
  if (t.next != kHaltState && t.next >= table_.size()) throw std::out_of_range("unknown next state");
  table_[q][read] = t;
}

MultiRun run_multi(const MultiMachine& m, std::vector<std::uint8_t> tape, std::uint64_t max_steps) {
  std::deque<std::uint8_t> cells(tape.begin(), tape.end());
  if (cells.empty()) cells.push_back(0);
  std::int64_t origin = 0;
  MultiRun r;
  while (r.steps < max_steps) {
    const auto idx = static_cast<std::size_t>(r.head - origin);
    const auto& t = m.at(r.state, cells[idx]);
    ++r.steps;
    if (!t) {
      r.halted = true;
      break;
    }
    cells[idx] = t->write;
    r.head += static_cast<int>(t->move);
    if (r.head < origin) {
      cells.push_front(0);
      --origin;
    } else if (r.head - origin >= static_cast<std::int64_t>(cells.size())) {
      cells.push_back(0);
    }
    if (t->next == kHaltState) {
      r.halted = true;
      break;
    }
    r.state = t->next;
  }
  r.origin = origin;
  r.cells.assign(cells.begin(), cells.end());
  return r;
}

namespace {

unsigned block_bit(unsigned code, unsigned pos, unsigned bits) { return (code >> (bits - 1 - pos)) & 1U; }

}  // namespace

Machine compile_to_binary(const MultiMachine& m, unsigned bits) {
  if (bits < 2 || bits > 8 || m.num_symbols() > (1U << bits)) throw std::invalid_argument("block width too small");
  const std::size_t tree = (std::size_t{1} << bits) - 1;

  // Write chains are keyed by (symbol, move, next, position); skip chains by
  // (move, next, count already skipped).
  using WriteKey = std::tuple<unsigned, int, StateIndex, unsigned>;
  using SkipKey = std::tuple<int, StateIndex, unsigned>;
  std::map<WriteKey, StateIndex> writes;
  std::map<SkipKey, StateIndex> skips;
  std::size_t total = m.num_states() * tree;
  auto alloc = [&total]() {
    if (total >= kMaxStates) throw std::length_error("compiled machine too large");
    return static_cast<StateIndex>(total++);
  };
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    for (unsigned s = 0; s < m.num_symbols(); ++s) {
      const auto& t = m.at(q, static_cast<std::uint8_t>(s));
      if (!t) continue;
      const int d = static_cast<int>(t->move);
      for (unsigned pos = 0; pos + 1 < bits; ++pos) writes.try_emplace({t->write, d, t->next, pos}, 0);
      if (t->next != kHaltState) {
        for (unsigned j = 1; j < bits; ++j) skips.try_emplace({d, t->next, j}, 0);
      }
    }
  }
  for (auto& [key, idx] : writes) idx = alloc();
  for (auto& [key, idx] : skips) idx = alloc();

  Machine out(total);
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    const std::size_t base = q * tree;
    // Heap-ordered read tree: node k (1-based) has children 2k and 2k+1.
    for (std::size_t k = 1; k <= tree; ++k) {
      const auto self = static_cast<StateIndex>(base + k - 1);
      for (Symbol x = 0; x < 2; ++x) {
        const std::size_t child = 2 * k + x;
        if (child <= tree) {
          out.set(self, x, Transition{x, Move::Right, static_cast<StateIndex>(base + child - 1)});
          continue;
        }
        const auto code = static_cast<unsigned>(child - (tree + 1));
        if (code >= m.num_symbols()) continue;
        const auto& t = m.at(q, static_cast<std::uint8_t>(code));
        if (!t) continue;
        const int d = static_cast<int>(t->move);
        out.set(self, x,
                Transition{static_cast<Symbol>(block_bit(t->write, bits - 1, bits)), Move::Left,
                           writes.at({t->write, d, t->next, bits - 2})});
      }
    }
  }
  for (const auto& [key, self] : writes) {
    const auto [code, d, next, pos] = key;
    Transition t;
    t.write = static_cast<Symbol>(block_bit(code, pos, bits));
    if (pos > 0) {
      t.move = Move::Left;
      t.next = writes.at({code, d, next, pos - 1});
    } else {
      t.move = static_cast<Move>(d);
      t.next = next == kHaltState ? kHaltState : skips.at({d, next, 1});
    }
    out.set(self, 0, t);
    out.set(self, 1, t);
  }
  for (const auto& [key, self] : skips) {
    const auto [d, next, j] = key;
    const StateIndex to = j + 1 < bits ? skips.at({d, next, j + 1}) : static_cast<StateIndex>(next * tree);
    for (Symbol x = 0; x < 2; ++x) out.set(self, x, Transition{x, static_cast<Move>(d), to});
  }
  return out;
}

InputWord blocks_to_binary(const std::vector<std::uint8_t>& cells, unsigned bits) {
  InputWord w;
  w.symbols.reserve(cells.size() * bits);
  for (const std::uint8_t c : cells) {
    for (unsigned pos = 0; pos < bits; ++pos) w.symbols.push_back(static_cast<Symbol>(block_bit(c, pos, bits)));
  }
  return w;
}

namespace {

enum Sym : std::uint8_t { kB_, kA, kBb, kUA, kUB, kSharp, kDollar, kS, kM, kK, kL, kR, kI, kJ, kH, kU };

class Builder {
 public:
  Builder() : m_(16) {}

  StateIndex state(std::string name) { return m_.add_state(std::move(name)); }
  void on(StateIndex q, Sym read, Sym write, Move d, StateIndex next) { m_.set(q, read, {write, d, next}); }
  // Every still-undefined symbol: keep it and move on, staying in q.
  void scan(StateIndex q, Move d) { rest(q, d, q); }
  void rest(StateIndex q, Move d, StateIndex next) {
    for (unsigned s = 0; s < 16; ++s) {
      if (!m_.at(q, static_cast<std::uint8_t>(s))) m_.set(q, static_cast<std::uint8_t>(s), {static_cast<std::uint8_t>(s), d, next});
    }
  }
  void copy(StateIndex to, StateIndex from, Sym s) { m_.set(to, s, *m_.at(from, s)); }

  MultiMachine done() { return std::move(m_); }

 private:
  MultiMachine m_;
};

MultiMachine build_universal() {
  constexpr Move L = Move::Left;
  constexpr Move R = Move::Right;
  Builder b;
  const StateIndex find = b.state("find-head");
  const StateIndex gotab[2] = {b.state("to-table-0"), b.state("to-table-1")};
  const StateIndex skip_first = b.state("skip-entry-0");
  const StateIndex skip_rest = b.state("skip-entry-0-rest");
  const StateIndex entry = b.state("at-entry");
  const StateIndex ent_d[2] = {b.state("entry-write-0"), b.state("entry-write-1")};
  StateIndex ent_t[2][2], tohead[2][2][2], newhead[2], shift[4][2], after[2], incgo[2], inc[2];
  for (int w = 0; w < 2; ++w) {
    for (int d = 0; d < 2; ++d) {
      const std::string tag = std::to_string(w) + (d ? "R" : "L");
      ent_t[w][d] = b.state("entry-target-" + tag);
      for (int f = 0; f < 2; ++f) tohead[w][d][f] = b.state("to-head-" + tag + (f ? "-halt" : ""));
    }
  }
  for (int f = 0; f < 2; ++f) {
    const std::string tag = f ? "-halt" : "";
    newhead[f] = b.state("new-head" + tag);
    for (int c = 0; c < 4; ++c) shift[c][f] = b.state("shift-" + std::string(1, "abAB"[c]) + tag);
    incgo[f] = b.state("to-counter" + tag);
    inc[f] = b.state("increment" + tag);
  }
  const StateIndex unmark = b.state("unmark");
  const StateIndex to_sharp = b.state("cursor-to-start");
  const StateIndex setk = b.state("cursor-set");
  const StateIndex cnt_left = b.state("count-left");
  const StateIndex cnt_scan = b.state("count-find-mark");
  const StateIndex cnt_pass = b.state("count-pass-marks");
  const StateIndex mk_left = b.state("cursor-left");
  const StateIndex mk_scan = b.state("cursor-find");
  const StateIndex mk_next = b.state("cursor-next");
  const StateIndex fin_left = b.state("select-left");
  const StateIndex fin_scan = b.state("select-cursor");
  const StateIndex rst_left = b.state("restore-left");
  const StateIndex rst = b.state("restore");
  after[0] = unmark;
  after[1] = incgo[1];

  // Locate the simulated head; a blank there means the empty input.
  b.on(find, kUA, kUA, L, gotab[0]);
  b.on(find, kUB, kUB, L, gotab[1]);
  b.on(find, kB_, kUA, L, gotab[0]);
  b.scan(find, R);
  b.on(gotab[0], kM, kM, R, entry);
  b.on(gotab[1], kM, kM, R, skip_first);
  b.scan(gotab[0], L);
  b.scan(gotab[1], L);

  // Read the entry: write digit, direction, first target mark.
  b.on(entry, kU, kU, L, incgo[1]);
  b.on(entry, kA, kA, R, ent_d[0]);
  b.on(entry, kBb, kBb, R, ent_d[1]);
  b.rest(skip_first, R, skip_rest);
  for (const Sym s : {kL, kR, kI, kH}) b.on(skip_rest, s, s, R, skip_rest);
  for (const Sym s : {kA, kBb, kU}) b.copy(skip_rest, entry, s);
  for (int w = 0; w < 2; ++w) {
    b.on(ent_d[w], kL, kL, R, ent_t[w][0]);
    b.on(ent_d[w], kR, kR, R, ent_t[w][1]);
    for (int d = 0; d < 2; ++d) {
      b.on(ent_t[w][d], kH, kH, R, tohead[w][d][1]);
      b.on(ent_t[w][d], kI, kJ, R, tohead[w][d][0]);
      for (int f = 0; f < 2; ++f) {
        const Sym written = w ? kBb : kA;
        b.on(tohead[w][d][f], kUA, written, d ? R : L, newhead[f]);
        b.on(tohead[w][d][f], kUB, written, d ? R : L, newhead[f]);
        b.scan(tohead[w][d][f], R);
      }
    }
  }

  // Mark the new head cell, inserting a cell when it falls off the left end.
  const Sym carried[4] = {kA, kBb, kUA, kUB};
  for (int f = 0; f < 2; ++f) {
    b.on(newhead[f], kA, kUA, L, after[f]);
    b.on(newhead[f], kBb, kUB, L, after[f]);
    b.on(newhead[f], kB_, kUA, L, after[f]);
    b.on(newhead[f], kDollar, kDollar, R, shift[2][f]);
    for (int c = 0; c < 4; ++c) {
      for (int y = 0; y < 4; ++y) b.on(shift[c][f], carried[y], carried[c], R, shift[y][f]);
      b.on(shift[c][f], kB_, carried[c], L, after[f]);
    }
  }

  // Select the target state: cursor K steps one group per remaining mark.
  b.on(unmark, kM, kS, L, to_sharp);
  b.scan(unmark, L);
  b.on(to_sharp, kSharp, kSharp, R, setk);
  b.scan(to_sharp, L);
  b.on(setk, kS, kK, L, cnt_left);
  b.scan(setk, R);
  b.on(cnt_left, kSharp, kSharp, R, cnt_scan);
  b.scan(cnt_left, L);
  b.on(cnt_scan, kJ, kJ, R, cnt_pass);
  b.scan(cnt_scan, R);
  b.on(cnt_pass, kJ, kJ, R, cnt_pass);
  b.on(cnt_pass, kI, kJ, L, mk_left);
  b.rest(cnt_pass, L, fin_left);
  b.on(mk_left, kSharp, kSharp, R, mk_scan);
  b.scan(mk_left, L);
  b.on(mk_scan, kK, kS, R, mk_next);
  b.scan(mk_scan, R);
  b.on(mk_next, kS, kK, L, cnt_left);
  b.scan(mk_next, R);
  b.on(fin_left, kSharp, kSharp, R, fin_scan);
  b.scan(fin_left, L);
  b.on(fin_scan, kK, kM, L, rst_left);
  b.scan(fin_scan, R);
  b.on(rst_left, kSharp, kSharp, R, rst);
  b.scan(rst_left, L);
  b.on(rst, kJ, kI, R, rst);
  b.on(rst, kDollar, kDollar, L, incgo[0]);
  b.scan(rst, R);

  // Count the step, then either continue or stop.
  for (int f = 0; f < 2; ++f) {
    b.on(incgo[f], kSharp, kSharp, L, inc[f]);
    b.scan(incgo[f], L);
    const StateIndex done = f ? kHaltState : find;
    b.on(inc[f], kBb, kA, L, inc[f]);
    b.on(inc[f], kA, kBb, R, done);
    b.on(inc[f], kB_, kBb, R, done);
  }
  return b.done();
}

std::uint8_t code_of(char c) {
  const auto pos = kUtmAlphabet.find(c);
  if (pos == std::string_view::npos) throw std::invalid_argument("not a working symbol");
  return static_cast<std::uint8_t>(pos);
}

}  // namespace

const MultiMachine& universal_multi_machine() {
  static const MultiMachine m = build_universal();
  return m;
}

const Machine& universal_machine() {
  static const Machine m = compile_to_binary(universal_multi_machine(), 4);
  return m;
}

UtmEncoding encode(const Machine& m, const InputWord& w) {
  if (m.num_states() == 0 || m.num_states() > 26) throw std::invalid_argument("machine must have between 1 and 26 states");
  std::string text = "#";
  for (StateIndex q = 0; q < m.num_states(); ++q) {
    text += q == 0 ? 'M' : 'S';
    for (Symbol s = 0; s < 2; ++s) {
      const auto& t = m.at(q, s);
      if (!t) {
        text += 'u';
        continue;
      }
      text += t->write ? 'b' : 'a';
      text += t->move == Move::Left ? 'L' : 'R';
      text += t->halts() ? std::string("h") : std::string(t->next + 1U, 'i');
    }
  }
  text += '$';
  for (std::size_t i = 0; i < w.size(); ++i) text += i == 0 ? (w.symbols[i] ? 'B' : 'A') : (w.symbols[i] ? 'b' : 'a');

  UtmEncoding enc;
  for (const char c : text) enc.blocks.push_back(code_of(c));
  enc.tape = blocks_to_binary(enc.blocks);
  return enc;
}

std::string encoding_text(const UtmEncoding& enc) {
  std::string s;
  for (const std::uint8_t c : enc.blocks) s += c < kUtmAlphabet.size() ? kUtmAlphabet[c] : '?';
  return s;
}

std::pair<Machine, InputWord> decode(const UtmEncoding& enc) {
  const auto& bits = enc.tape.symbols;
  if (bits.size() % 4 != 0) throw FormatError("encoded tape length is not a multiple of 4", bits.size());
  std::string text;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    const unsigned code = bits[i] * 8U + bits[i + 1] * 4U + bits[i + 2] * 2U + bits[i + 3];
    text += kUtmAlphabet[code];
  }
  std::size_t pos = 0;
  auto fail = [&pos](const std::string& what) { return FormatError(what, pos); };
  auto peek = [&]() { return pos < text.size() ? text[pos] : '\0'; };
  if (peek() != '#') throw fail("expected '#'");
  ++pos;

  struct Entry {
    std::optional<Transition> t;
    std::size_t target;  // for range checking after all groups are read
  };
  std::vector<std::array<Entry, 2>> groups;
  while (peek() == 'M' || peek() == 'S') {
    if ((peek() == 'M') != groups.empty()) throw fail("state marker out of place");
    ++pos;
    std::array<Entry, 2> g;
    for (auto& e : g) {
      const char c = peek();
      if (c == 'u') {
        ++pos;
        continue;
      }
      if (c != 'a' && c != 'b') throw fail("expected an entry");
      Transition t;
      t.write = c == 'b';
      ++pos;
      if (peek() != 'L' && peek() != 'R') throw fail("expected a direction");
      t.move = peek() == 'L' ? Move::Left : Move::Right;
      ++pos;
      if (peek() == 'h') {
        ++pos;
        e.t = t;
        continue;
      }
      std::size_t count = 0;
      while (peek() == 'i') {
        ++count;
        ++pos;
      }
      if (count == 0) throw fail("expected a target");
      t.next = static_cast<StateIndex>(count - 1);
      e.t = t;
      e.target = count - 1;
    }
    groups.push_back(g);
  }
  if (groups.empty()) throw fail("no states");
  if (peek() != '$') throw fail("expected '$'");
  ++pos;
  InputWord w;
  for (std::size_t i = 0; pos < text.size(); ++i, ++pos) {
    const char c = text[pos];
    const bool head = c == 'A' || c == 'B';
    const bool cell = c == 'a' || c == 'b';
    if ((i == 0 && !head) || (i > 0 && !cell)) throw fail("malformed input cell");
    w.symbols.push_back(c == 'B' || c == 'b');
  }
  Machine m(groups.size());
  for (std::size_t q = 0; q < groups.size(); ++q) {
    for (Symbol s = 0; s < 2; ++s) {
      const Entry& e = groups[q][s];
      if (!e.t) continue;
      if (!e.t->halts() && e.target >= groups.size()) throw FormatError("target state out of range", 0);
      m.set(static_cast<StateIndex>(q), s, *e.t);
    }
  }
  return {m, w};
}

RunOutcome run_via_utm(const UtmEncoding& enc, const RunLimits& lim) {
  RunLimits l = lim;
  l.snapshot_cap = std::numeric_limits<std::size_t>::max();
  return run_direct(universal_machine(), enc.tape, l);
}

namespace {

UtmRecovery normalized(bool halted, BigNat steps, const std::vector<Symbol>& cells, std::int64_t head) {
  UtmRecovery r;
  r.halted = halted;
  r.steps = std::move(steps);
  std::size_t first = cells.size(), last = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i]) continue;
    ++r.marks;
    first = std::min(first, i);
    last = i;
  }
  if (r.marks == 0) return r;
  r.cells.assign(cells.begin() + static_cast<std::ptrdiff_t>(first), cells.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  r.head = head - static_cast<std::int64_t>(first);
  return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

}  // namespace

UtmRecovery recover(const RunOutcome& utm_run) {
  if (!utm_run.tape || utm_run.tape->truncated) throw FormatError("final tape not available", 0);
  const TapeSnapshot& snap = *utm_run.tape;
  const std::int64_t lo = floor_div(snap.origin, 4);
  const std::int64_t hi = floor_div(snap.origin + static_cast<std::int64_t>(snap.cells.size()) - 1, 4);
  auto bit = [&snap](std::int64_t x) -> unsigned {
    const std::int64_t i = x - snap.origin;
    return i >= 0 && i < static_cast<std::int64_t>(snap.cells.size()) ? snap.cells[static_cast<std::size_t>(i)] : 0U;
  };
  std::string text;
  for (std::int64_t blk = lo; blk <= hi; ++blk) {
    const unsigned code = bit(4 * blk) * 8U + bit(4 * blk + 1) * 4U + bit(4 * blk + 2) * 2U + bit(4 * blk + 3);
    text += kUtmAlphabet[code];
  }
  const auto sharp = text.find('#');
  if (sharp == std::string::npos || text.find('#', sharp + 1) != std::string::npos) {
    throw FormatError("no unique '#' on the final tape", 0);
  }
  BigNat steps = 0;
  BigNat weight = 1;
  for (std::size_t i = sharp; i-- > 0 && (text[i] == 'a' || text[i] == 'b');) {
    if (text[i] == 'b') steps += weight;
    weight *= 2;
  }
  const auto dollar = text.find('$', sharp);
  if (dollar == std::string::npos) throw FormatError("no '$' on the final tape", sharp);
  std::vector<Symbol> cells;
  std::int64_t head = 0;
  int heads = 0;
  for (std::size_t i = dollar + 1; i < text.size(); ++i) {
    const char c = text[i];
    if (c != 'a' && c != 'b' && c != 'A' && c != 'B') break;
    if (c == 'A' || c == 'B') {
      head = static_cast<std::int64_t>(cells.size());
      ++heads;
    }
    cells.push_back(c == 'b' || c == 'B');
  }
  if (utm_run.halted() && heads != 1) throw FormatError("no unique simulated head", dollar);
  return normalized(utm_run.halted(), std::move(steps), cells, head);
}

UtmRecovery recovery_of(const RunOutcome& direct) {
  std::vector<Symbol> cells;
  std::int64_t origin = direct.head;
  if (direct.tape) {
    cells = direct.tape->cells;
    origin = direct.tape->origin;
  }
  return normalized(direct.halted(), direct.steps, cells, direct.head - origin);
}

bool same_recovery(const UtmRecovery& a, const UtmRecovery& b) {
  return a.halted == b.halted && a.steps == b.steps && a.marks == b.marks && a.head == b.head && a.cells == b.cells;
}

}  // namespace tmlab
