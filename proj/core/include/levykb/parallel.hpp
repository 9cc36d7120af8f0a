#ifndef LEVYKB_PARALLEL_HPP
#define LEVYKB_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace levykb {

// Runs fn(i) for i in [0, count) across `threads` workers (0 = hardware
// concurrency). Results must be written to per-index slots by the caller so
// aggregation order stays deterministic regardless of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

} // namespace levykb

#endif
