// Tape representations: a dense array tape for the reference stepper and a
// run-length-encoded tape for the accelerated stepper. Both keep an
// incremental count of marked cells.

#ifndef TMLAB_TAPE_HPP_
#define TMLAB_TAPE_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace tmlab {

using Symbol = std::uint8_t;  // 0 = blank, 1 = mark

inline constexpr std::size_t kDefaultCellBudget = std::size_t{1} << 30;

class SpaceLimitError : public std::runtime_error {
 public:
  explicit SpaceLimitError(std::int64_t cell)
      : std::runtime_error("tape cell budget exceeded"), cell_(cell) {}
  std::int64_t cell() const { return cell_; }

 private:
  std::int64_t cell_;
};

// Closed interval of cell indices; empty when lo > hi.
struct Extent {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  bool empty() const { return lo > hi; }
  std::uint64_t size() const { return empty() ? 0 : static_cast<std::uint64_t>(hi - lo) + 1; }
  void include(std::int64_t i) {
    if (empty()) {
      lo = hi = i;
    } else {
      if (i < lo) lo = i;
      if (i > hi) hi = i;
    }
  }
  friend bool operator==(const Extent&, const Extent&) = default;
};

// Marked region of a tape, trimmed to the outermost marks. Capped copies
// keep the leftmost `cap` cells and set `truncated`.
struct TapeSnapshot {
  std::int64_t origin = 0;
  std::vector<Symbol> cells;
  bool truncated = false;

  friend bool operator==(const TapeSnapshot&, const TapeSnapshot&) = default;
};

inline constexpr std::size_t kDefaultSnapshotCap = std::size_t{1} << 16;

class DenseTape {
 public:
  explicit DenseTape(std::size_t cell_budget = kDefaultCellBudget) : budget_(cell_budget) {}
  DenseTape(std::span<const Symbol> word, std::size_t cell_budget = kDefaultCellBudget);

  Symbol cell(std::int64_t i) const {
    const std::int64_t k = i - base_;
    if (k < 0 || k >= static_cast<std::int64_t>(cells_.size())) return 0;
    return cells_[static_cast<std::size_t>(k)];
  }

  // Throws SpaceLimitError when the written extent would exceed the budget.
  void write(std::int64_t i, Symbol s) {
    const std::int64_t k = i - base_;
    if (k < 0 || k >= static_cast<std::int64_t>(cells_.size())) grow_to(i);
    Symbol& c = cells_[static_cast<std::size_t>(i - base_)];
    marks_ += static_cast<std::int64_t>(s) - static_cast<std::int64_t>(c);
    c = s;
    extent_.include(i);
  }

  std::uint64_t marks() const { return marks_; }
  const Extent& extent() const { return extent_; }
  std::size_t cell_budget() const { return budget_; }

  // Full recount; the incremental count must always agree with it.
  std::uint64_t recount() const;
  bool same_cells(const DenseTape& other) const;
  TapeSnapshot snapshot(std::size_t cap = kDefaultSnapshotCap) const;

 private:
  void grow_to(std::int64_t i);

  std::vector<Symbol> cells_;
  std::int64_t base_ = 0;  // absolute index of cells_[0]
  std::uint64_t marks_ = 0;
  Extent extent_;
  std::size_t budget_;
};

struct Run {
  Symbol symbol = 0;
  std::uint64_t length = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

// Merges adjacent equal-symbol runs and drops zero-length runs.
std::vector<Run> canonicalize(std::vector<Run> runs);

inline constexpr std::uint64_t kInfiniteRun = std::numeric_limits<std::uint64_t>::max();

// Head cell plus runs fanning out to each side. Sides are stored nearest-last
// so that head motion touches only the vector backs. Blanks past the
// outermost run are implicit and never stored.
class RleTape {
 public:
  RleTape() = default;
  explicit RleTape(std::span<const Symbol> word);
  // Runs are given nearest-first on each side and canonicalized.
  static RleTape from_runs(std::int64_t head, Symbol head_symbol, std::vector<Run> left_nearest_first,
                           std::vector<Run> right_nearest_first);

  std::int64_t head() const { return head_; }
  Symbol head_symbol() const { return head_symbol_; }
  Symbol cell(std::int64_t i) const;
  void write(std::int64_t i, Symbol s);
  std::uint64_t marks() const { return marks_; }
  const Extent& extent() const { return extent_; }

  void write_head(Symbol s) {
    marks_ += static_cast<std::int64_t>(s) - static_cast<std::int64_t>(head_symbol_);
    head_symbol_ = s;
    extent_.include(head_);
  }
  void move(int dir);

  // Cells starting at the head, in direction dir, that hold the head symbol
  // contiguously. kInfiniteRun when that block is the implicit blank end.
  std::uint64_t block_length(int dir) const;
  // Writes s over k cells starting at the head, moving in dir; the head ends
  // k cells away. Requires 1 <= k <= block_length(dir).
  void sweep(int dir, std::uint64_t k, Symbol s);

  // Nearest-first copies of each side.
  std::vector<Run> left_runs() const { return {left_.rbegin(), left_.rend()}; }
  std::vector<Run> right_runs() const { return {right_.rbegin(), right_.rend()}; }

  std::uint64_t recount() const;
  TapeSnapshot snapshot(std::size_t cap = kDefaultSnapshotCap) const;

  friend bool operator==(const RleTape& a, const RleTape& b) {
    return a.head_ == b.head_ && a.head_symbol_ == b.head_symbol_ && a.left_ == b.left_ &&
           a.right_ == b.right_;
  }

 private:
  static void push_near(std::vector<Run>& side, Symbol s, std::uint64_t n);
  static void side_write(std::vector<Run>& side, std::uint64_t distance, Symbol s);
  static Symbol side_cell(const std::vector<Run>& side, std::uint64_t distance);
  static void trim_far_blanks(std::vector<Run>& side);

  std::vector<Run> left_;   // back() adjacent to head
  std::vector<Run> right_;  // back() adjacent to head
  Symbol head_symbol_ = 0;
  std::int64_t head_ = 0;
  std::uint64_t marks_ = 0;
  Extent extent_;
};

}  // namespace tmlab

#endif  // TMLAB_TAPE_HPP_
