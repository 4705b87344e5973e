#pragma once

#include <cstddef>
#include <functional>

namespace corrsense {

// Runs fn(0) .. fn(count - 1) on up to `threads` workers (0 picks the
// hardware concurrency). Items are claimed in index order; the exception of
// the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

int resolve_threads(int requested);

}  // namespace corrsense
