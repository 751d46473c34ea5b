#pragma once

#include <cstddef>
#include <functional>

namespace mrseql {

/// Worker count: MRSEQL_THREADS if set, else `requested`, else hardware concurrency.
std::size_t resolve_threads(std::size_t requested = 0);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks must not
/// share mutable state; results are written by index. After all workers stop,
/// the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace mrseql
