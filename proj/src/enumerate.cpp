#include "tmlab/enumerate.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

#include "tmlab/format.hpp"

namespace tmlab {

namespace {

struct Node {
  Machine machine;
  std::size_t used = 1;  // states introduced so far
};

enum class Probe { Undefined, StepLimit };

struct ProbeResult {
  Probe kind;
  std::uint64_t steps = 0;  // including the step that reads the undefined slot
  std::uint64_t marks = 0;
  StateIndex state = 0;
  Symbol read = 0;
};

// Runs the partial machine from a blank tape until it reads an undefined slot
// or the budget runs out. TNF machines never contain Z transitions.
ProbeResult probe(const Machine& m, const RunLimits& budget) {
  const std::uint64_t max_steps = saturate_u64(budget.max_steps);
  DenseTape tape(static_cast<std::size_t>(budget.max_cells + 1));
  StateIndex state = 0;
  std::int64_t head = 0;
  std::uint64_t steps = 0;
  try {
    while (steps < max_steps) {
      const Symbol read = tape.cell(head);
      const auto& t = m.at(state, read);
      ++steps;
      if (!t) return {Probe::Undefined, steps, tape.marks(), state, read};
      tape.write(head, t->write);
      head += static_cast<int>(t->move);
      state = t->next;
    }
  } catch (const SpaceLimitError&) {
  }
  return {Probe::StepLimit, steps, tape.marks(), state, 0};
}

Verdict classify(const Machine& m, const EnumerationOptions& opt) {
  return decide_all(m, {}, opt.budget, opt.deciders);
}

class Explorer {
 public:
  Explorer(std::size_t n, const EnumerationOptions& opt) : n_(n), opt_(opt) {}

  // Expands one node: records its leaves and returns its children.
  std::vector<Node> expand(const Node& node) {
    std::vector<Node> children;
    const ProbeResult r = probe(node.machine, opt_.budget);
    if (r.kind == Probe::StepLimit) {
      leaves_.push_back(Leaf{serialize_machine(node.machine), node.machine, classify(node.machine, opt_)});
      return children;
    }
    Machine halter = node.machine;
    halter.set(r.state, r.read, Transition{1, Move::Right, kHaltState});
    leaves_.push_back(Leaf{serialize_machine(halter), halter, Verdict::halts(r.steps, r.marks + (r.read == 0 ? 1 : 0))});

    if (node.machine.defined_count() + 1 >= 2 * n_) return children;
    const std::size_t targets = std::min(node.used + 1, n_);
    for (std::size_t next = 0; next < targets; ++next) {
      for (Symbol w = 0; w < 2; ++w) {
        for (Move d : {Move::Left, Move::Right}) {
          Node child{node.machine, std::max(node.used, next + 1)};
          child.machine.set(r.state, r.read, Transition{w, d, static_cast<StateIndex>(next)});
          children.push_back(std::move(child));
        }
      }
    }
    return children;
  }

  void explore(const Node& node) {
    for (const Node& c : expand(node)) explore(c);
  }

  std::vector<Leaf>& leaves() { return leaves_; }

 private:
  std::size_t n_;
  const EnumerationOptions& opt_;
  std::vector<Leaf> leaves_;
};

Node root(std::size_t n) {
  if (n == 0 || n > kMaxTextStates) throw std::invalid_argument("state count must be between 1 and 25");
  Node r{Machine(n), 1};
  if (n >= 2) {
    r.machine.set(0, 0, Transition{1, Move::Right, 1});
    r.used = 2;
  }
  return r;
}

EnumerationReport summarize(std::size_t n, std::vector<Leaf> leaves, const EnumerationOptions& opt) {
  std::sort(leaves.begin(), leaves.end(), [](const Leaf& a, const Leaf& b) { return a.text < b.text; });
  EnumerationReport rep;
  rep.states = n;
  rep.budget = opt.budget.max_steps;
  for (const Leaf& l : leaves) {
    switch (l.verdict.kind) {
      case VerdictKind::Halts: {
        ++rep.halting;
        const auto steps = static_cast<std::uint64_t>(l.verdict.steps);
        if (l.verdict.marks > rep.sigma) {
          rep.sigma = l.verdict.marks;
          rep.champions.clear();
        }
        if (l.verdict.marks == rep.sigma) rep.champions.push_back(l.text);
        if (steps > rep.s) {
          rep.s = steps;
          rep.step_champions.clear();
        }
        if (steps == rep.s) rep.step_champions.push_back(l.text);
        break;
      }
      case VerdictKind::NeverHalts: ++rep.nonhalting; break;
      case VerdictKind::Unknown: rep.holdouts.push_back(l.text); break;
    }
  }
  if (opt.keep_leaves) rep.leaves = std::move(leaves);
  return rep;
}

}  // namespace

EnumerationReport enumerate_serial(std::size_t n, const EnumerationOptions& opt) {
  Explorer ex(n, opt);
  ex.explore(root(n));
  return summarize(n, std::move(ex.leaves()), opt);
}

EnumerationReport enumerate(std::size_t n, const EnumerationOptions& opt) {
  const int threads = opt.jobs > 0 ? opt.jobs : omp_get_max_threads();
  // Breadth-first until there is enough independent work to spread.
  Explorer top(n, opt);
  std::vector<Node> frontier{root(n)};
  const std::size_t target = static_cast<std::size_t>(threads) * 64;
  while (!frontier.empty() && frontier.size() < target) {
    std::vector<Node> next;
    for (const Node& node : frontier) {
      auto kids = top.expand(node);
      std::move(kids.begin(), kids.end(), std::back_inserter(next));
    }
    frontier = std::move(next);
  }

  std::vector<std::vector<Leaf>> parts(frontier.size());
  const auto count = static_cast<std::int64_t>(frontier.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t i = 0; i < count; ++i) {
    Explorer ex(n, opt);
    ex.explore(frontier[static_cast<std::size_t>(i)]);
    parts[static_cast<std::size_t>(i)] = std::move(ex.leaves());
  }

  std::vector<Leaf> leaves = std::move(top.leaves());
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(leaves));
  return summarize(n, std::move(leaves), opt);
}

}  // namespace tmlab
