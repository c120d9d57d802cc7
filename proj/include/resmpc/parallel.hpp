#pragma once

#include <cstddef>
#include <functional>

namespace resmpc {

/// Number of workers the pool will use. Resolved once from REPO_THREADS
/// (0 or unset = hardware concurrency) unless overridden by set_worker_count.
int worker_count();

/// Test hook / programmatic override. 0 restores the automatic value.
void set_worker_count(int n);

/// Runs fn(i) for every i in [0, n), distributing indices over the worker
/// pool. Each index is executed exactly once; result slots must be disjoint
/// per index and any cross-index reduction is the caller's job (do it in a
/// fixed order afterwards so results do not depend on the thread count).
/// Nested calls from inside a worker run inline. Exceptions propagate to the
/// caller (the first one thrown in index order).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace resmpc
