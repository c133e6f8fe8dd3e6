// Batch simulation kernel: an OpenMP version and the serial reference it is
// tested against. Results are in input order regardless of scheduling.

#ifndef TMLAB_BATCH_HPP_
#define TMLAB_BATCH_HPP_

#include <span>
#include <vector>

#include "tmlab/simulator.hpp"

namespace tmlab {

struct BatchItem {
  Machine machine;
  InputWord input;
};

std::vector<RunOutcome> run_batch_serial(std::span<const BatchItem> items, const RunLimits& lim, Engine engine);

// jobs <= 0 uses the OpenMP default thread count.
std::vector<RunOutcome> run_batch(std::span<const BatchItem> items, const RunLimits& lim, Engine engine,
                                  int jobs = 0);

}  // namespace tmlab

#endif  // TMLAB_BATCH_HPP_
