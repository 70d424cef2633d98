#pragma once

#include <cstddef>
#include <functional>

namespace projsmooth {

// Worker count: PROJSMOOTH_THREADS if set to a positive integer, otherwise
// std::thread::hardware_concurrency().
std::size_t thread_count();

// Runs body(block) for every block in [0, block_count). Blocks are handed out
// dynamically; callers that reduce must store per-block results and combine
// them in block order so the outcome does not depend on scheduling.
void parallel_for_blocks(std::size_t block_count,
                         const std::function<void(std::size_t)>& body);

}  // namespace projsmooth
