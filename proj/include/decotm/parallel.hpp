#pragma once

#include <cstddef>
#include <functional>

namespace decotm {

/// 0 means one worker per hardware thread.
int resolve_threads(int requested);

/// Calls body(i) for i in [0, count) on `threads` workers. Work items are
/// independent; callers write results into per-index slots so the outcome does
/// not depend on scheduling. The first exception thrown by any item is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace decotm
