#pragma once

#include <cstddef>
#include <functional>

namespace bknet {

/// Worker count: BKNET_THREADS if set to a positive integer, else the hardware count.
unsigned thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads.
/// Iterations must not share mutable state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bknet
