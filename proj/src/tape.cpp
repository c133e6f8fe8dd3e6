#include "tmlab/tape.hpp"

#include <algorithm>

namespace tmlab {

DenseTape::DenseTape(std::span<const Symbol> word, std::size_t cell_budget) : budget_(cell_budget) {
  if (word.size() > budget_) throw SpaceLimitError(static_cast<std::int64_t>(word.size()) - 1);
  cells_.assign(word.begin(), word.end());
  for (Symbol s : word) marks_ += s;
  if (!word.empty()) {
    extent_.include(0);
    extent_.include(static_cast<std::int64_t>(word.size()) - 1);
  }
}

void DenseTape::grow_to(std::int64_t i) {
  Extent wanted = extent_;
  wanted.include(i);
  if (wanted.size() > budget_) throw SpaceLimitError(i);

  const auto old_size = static_cast<std::int64_t>(cells_.size());
  if (old_size == 0) {
    cells_.assign(64, 0);
    base_ = i - 32;
    return;
  }
  const std::int64_t old_end = base_ + old_size;
  const std::int64_t needed = std::max(old_end, i + 1) - std::min(base_, i);
  std::int64_t new_size = std::min<std::int64_t>(old_size * 2, static_cast<std::int64_t>(budget_));
  new_size = std::max(new_size, needed);
  // Grow toward the side that overflowed; keep the existing cells in place.
  std::int64_t new_base = i < base_ ? old_end - new_size : base_;
  if (i < base_ && new_base > i) new_base = i;
  std::vector<Symbol> grown(static_cast<std::size_t>(new_size), 0);
  std::copy(cells_.begin(), cells_.end(), grown.begin() + (base_ - new_base));
  cells_ = std::move(grown);
  base_ = new_base;
}

std::uint64_t DenseTape::recount() const {
  return static_cast<std::uint64_t>(std::count(cells_.begin(), cells_.end(), Symbol{1}));
}

bool DenseTape::same_cells(const DenseTape& other) const {
  if (marks_ != other.marks_) return false;
  Extent span = extent_;
  if (!other.extent_.empty()) {
    span.include(other.extent_.lo);
    span.include(other.extent_.hi);
  }
  for (std::int64_t i = span.lo; i <= span.hi; ++i) {
    if (cell(i) != other.cell(i)) return false;
  }
  return true;
}

TapeSnapshot DenseTape::snapshot(std::size_t cap) const {
  TapeSnapshot snap;
  if (marks_ == 0) return snap;
  const auto first = std::find(cells_.begin(), cells_.end(), Symbol{1});
  const auto last = std::find(cells_.rbegin(), cells_.rend(), Symbol{1}).base();
  snap.origin = base_ + (first - cells_.begin());
  const auto len = static_cast<std::size_t>(last - first);
  snap.truncated = len > cap;
  snap.cells.assign(first, first + static_cast<std::ptrdiff_t>(std::min(len, cap)));
  return snap;
}

std::vector<Run> canonicalize(std::vector<Run> runs) {
  std::vector<Run> out;
  out.reserve(runs.size());
  for (const Run& r : runs) {
    if (r.length == 0) continue;
    if (!out.empty() && out.back().symbol == r.symbol) {
      out.back().length += r.length;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

RleTape::RleTape(std::span<const Symbol> word) {
  if (word.empty()) return;
  head_symbol_ = word[0];
  std::vector<Run> right;
  for (std::size_t i = 1; i < word.size(); ++i) right.push_back({word[i], 1});
  right = canonicalize(std::move(right));
  right_.assign(right.rbegin(), right.rend());
  trim_far_blanks(right_);
  marks_ = recount();
  extent_.include(0);
  extent_.include(static_cast<std::int64_t>(word.size()) - 1);
}

RleTape RleTape::from_runs(std::int64_t head, Symbol head_symbol, std::vector<Run> left_nearest_first,
                           std::vector<Run> right_nearest_first) {
  RleTape t;
  t.head_ = head;
  t.head_symbol_ = head_symbol;
  auto left = canonicalize(std::move(left_nearest_first));
  auto right = canonicalize(std::move(right_nearest_first));
  t.left_.assign(left.rbegin(), left.rend());
  t.right_.assign(right.rbegin(), right.rend());
  trim_far_blanks(t.left_);
  trim_far_blanks(t.right_);
  t.marks_ = t.recount();
  std::uint64_t lspan = 0, rspan = 0;
  for (const Run& r : t.left_) lspan += r.length;
  for (const Run& r : t.right_) rspan += r.length;
  t.extent_.include(head - static_cast<std::int64_t>(lspan));
  t.extent_.include(head + static_cast<std::int64_t>(rspan));
  return t;
}

void RleTape::trim_far_blanks(std::vector<Run>& side) {
  // Far end is the front of the vector.
  if (!side.empty() && side.front().symbol == 0) side.erase(side.begin());
}

void RleTape::push_near(std::vector<Run>& side, Symbol s, std::uint64_t n) {
  if (n == 0) return;
  if (side.empty()) {
    if (s != 0) side.push_back({s, n});
    return;
  }
  if (side.back().symbol == s) {
    side.back().length += n;
  } else {
    side.push_back({s, n});
  }
}

void RleTape::move(int dir) {
  auto& behind = dir > 0 ? left_ : right_;
  auto& ahead = dir > 0 ? right_ : left_;
  push_near(behind, head_symbol_, 1);
  if (ahead.empty()) {
    head_symbol_ = 0;
  } else {
    head_symbol_ = ahead.back().symbol;
    if (--ahead.back().length == 0) ahead.pop_back();
  }
  head_ += dir;
}

std::uint64_t RleTape::block_length(int dir) const {
  const auto& ahead = dir > 0 ? right_ : left_;
  if (ahead.empty()) return head_symbol_ == 0 ? kInfiniteRun : 1;
  if (ahead.back().symbol != head_symbol_) return 1;
  if (ahead.size() == 1 && head_symbol_ == 0) return kInfiniteRun;
  return 1 + ahead.back().length;
}

void RleTape::sweep(int dir, std::uint64_t k, Symbol s) {
  if (k == 0) return;
  auto& behind = dir > 0 ? left_ : right_;
  auto& ahead = dir > 0 ? right_ : left_;
  const Symbol old = head_symbol_;
  marks_ += (static_cast<std::int64_t>(s) - static_cast<std::int64_t>(old)) * static_cast<std::int64_t>(k);
  const auto sk = static_cast<std::int64_t>(k);
  extent_.include(head_);
  extent_.include(head_ + dir * (sk - 1));
  push_near(behind, s, k);
  // k-1 cells beyond the head are consumed from the same-symbol run ahead,
  // then the head lands on the next cell.
  std::uint64_t consume = k - 1;
  if (!ahead.empty() && ahead.back().symbol == old) {
    Run& near = ahead.back();
    if (consume < near.length) {
      near.length -= consume;
      head_symbol_ = old;
      if (--near.length == 0) ahead.pop_back();
      head_ += dir * sk;
      return;
    }
    consume -= near.length;
    ahead.pop_back();
  }
  // Whatever is left of `consume` came from the implicit blank end.
  if (ahead.empty()) {
    head_symbol_ = 0;
  } else {
    head_symbol_ = ahead.back().symbol;
    if (--ahead.back().length == 0) ahead.pop_back();
  }
  head_ += dir * sk;
}

Symbol RleTape::side_cell(const std::vector<Run>& side, std::uint64_t distance) {
  for (auto it = side.rbegin(); it != side.rend(); ++it) {
    if (distance <= it->length) return it->symbol;
    distance -= it->length;
  }
  return 0;
}

Symbol RleTape::cell(std::int64_t i) const {
  if (i == head_) return head_symbol_;
  if (i > head_) return side_cell(right_, static_cast<std::uint64_t>(i - head_));
  return side_cell(left_, static_cast<std::uint64_t>(head_ - i));
}

void RleTape::side_write(std::vector<Run>& side, std::uint64_t distance, Symbol s) {
  // Rebuild nearest-first, splitting the run containing `distance`.
  std::vector<Run> near_first(side.rbegin(), side.rend());
  std::vector<Run> out;
  out.reserve(near_first.size() + 3);
  std::uint64_t pos = 0;
  bool done = false;
  for (const Run& r : near_first) {
    if (!done && distance <= pos + r.length) {
      const std::uint64_t before = distance - pos - 1;
      out.push_back({r.symbol, before});
      out.push_back({s, 1});
      out.push_back({r.symbol, r.length - before - 1});
      done = true;
    } else {
      out.push_back(r);
    }
    pos += r.length;
  }
  if (!done) {
    out.push_back({0, distance - pos - 1});
    out.push_back({s, 1});
  }
  out = canonicalize(std::move(out));
  side.assign(out.rbegin(), out.rend());
  trim_far_blanks(side);
}

void RleTape::write(std::int64_t i, Symbol s) {
  const Symbol old = cell(i);
  marks_ += static_cast<std::int64_t>(s) - static_cast<std::int64_t>(old);
  extent_.include(i);
  if (i == head_) {
    head_symbol_ = s;
  } else if (old != s) {
    if (i > head_) {
      side_write(right_, static_cast<std::uint64_t>(i - head_), s);
    } else {
      side_write(left_, static_cast<std::uint64_t>(head_ - i), s);
    }
  }
}

std::uint64_t RleTape::recount() const {
  std::uint64_t n = head_symbol_;
  for (const Run& r : left_) n += r.symbol * r.length;
  for (const Run& r : right_) n += r.symbol * r.length;
  return n;
}

TapeSnapshot RleTape::snapshot(std::size_t cap) const {
  TapeSnapshot snap;
  if (marks_ == 0) return snap;
  // Leftmost cell of the stored region and a left-to-right run list.
  std::uint64_t lspan = 0;
  for (const Run& r : left_) lspan += r.length;
  std::vector<Run> runs(left_.begin(), left_.end());
  runs.push_back({head_symbol_, 1});
  runs.insert(runs.end(), right_.rbegin(), right_.rend());
  std::int64_t pos = head_ - static_cast<std::int64_t>(lspan);
  // Trim leading and trailing blank runs.
  std::size_t b = 0, e = runs.size();
  while (b < e && runs[b].symbol == 0) pos += static_cast<std::int64_t>(runs[b++].length);
  while (e > b && runs[e - 1].symbol == 0) --e;
  snap.origin = pos;
  for (std::size_t i = b; i < e; ++i) {
    const std::uint64_t room = cap - snap.cells.size();
    if (runs[i].length > room) {
      snap.cells.insert(snap.cells.end(), room, runs[i].symbol);
      snap.truncated = true;
      break;
    }
    snap.cells.insert(snap.cells.end(), runs[i].length, runs[i].symbol);
  }
  return snap;
}

}  // namespace tmlab
