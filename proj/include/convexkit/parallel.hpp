#pragma once

#include <cstddef>
#include <functional>

namespace convexkit {

// Worker count: CONVEXKIT_THREADS when set to a positive integer, otherwise
// the number of available cores.
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index is
// processed exactly once; the first exception is rethrown after the join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace convexkit
