#pragma once

#include <cstdint>
#include <functional>

namespace popsim {

/// Worker count: POPSIM_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned configured_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers with static
/// contiguous chunks. If any call throws, the exception from the smallest
/// failing index is rethrown after all workers finish.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& body);

}  // namespace popsim
