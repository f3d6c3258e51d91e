#pragma once

#include <cstdint>
#include <functional>

namespace cgkdm {

// Number of worker threads used by replicate loops. Reads CGKDM_THREADS once;
// falls back to hardware concurrency.
int thread_count();

// Runs fn(i) for i in [0, count). Work items must be independent; results
// are identical for any thread count because each index owns its output slot.
void parallel_for_index(std::int64_t count,
                        const std::function<void(std::int64_t)>& fn);

}  // namespace cgkdm
