#pragma once

#include <functional>

namespace packbench {

/// Worker count honouring the PACKBENCH_THREADS cap; requested <= 0 means
/// "as many as the hardware offers".
int resolve_threads(int requested);

/// Runs fn(i) for every i in [0, n) on up to `threads` workers. fn must only
/// write per-index state. The first exception thrown by fn is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace packbench
