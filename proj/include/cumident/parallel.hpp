#pragma once

#include <cstddef>
#include <functional>

namespace cumident {

// Worker cap: CUMIDENT_THREADS if set to a positive integer, otherwise the
// OpenMP default.
int worker_count();

// Runs body(i) for i in [0, count) across workers. Each index writes only its
// own output slot, so results do not depend on scheduling. The first
// exception (lowest index) is rethrown after the loop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace cumident
