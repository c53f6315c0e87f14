#pragma once

#include <cstddef>
#include <functional>

namespace conicvol {

// Worker count: CONICVOL_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
unsigned thread_count();

// Runs body(i) for i in [0, n) across thread_count() workers in contiguous
// blocks. body must not touch shared mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace conicvol
