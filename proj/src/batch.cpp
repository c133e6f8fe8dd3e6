#include "tmlab/batch.hpp"

#include <omp.h>

namespace tmlab {

std::vector<RunOutcome> run_batch_serial(std::span<const BatchItem> items, const RunLimits& lim, Engine engine) {
  std::vector<RunOutcome> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(run(item.machine, item.input, lim, engine));
  return out;
}

std::vector<RunOutcome> run_batch(std::span<const BatchItem> items, const RunLimits& lim, Engine engine, int jobs) {
  std::vector<RunOutcome> out(items.size());
  const auto n = static_cast<std::int64_t>(items.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = run(items[static_cast<std::size_t>(i)].machine,
                                           items[static_cast<std::size_t>(i)].input, lim, engine);
  }
  return out;
}

}  // namespace tmlab
