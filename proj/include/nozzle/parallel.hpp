#pragma once

#include <cstddef>
#include <functional>

namespace nozzle {

/// Worker count: NOZZLE_THREADS if set and positive, otherwise hardware concurrency.
unsigned worker_count();

/// Runs fn(i) for i in [0, n) split into contiguous chunks across workers.
/// Each index is processed exactly once; fn must only write to slots it owns.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nozzle
