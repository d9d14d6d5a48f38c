#pragma once

#include <cstddef>
#include <functional>

namespace catsense {

/// Worker count: CATSENSE_THREADS if set (clamped to >= 1), else
/// hardware_concurrency.
int max_threads();

/// Runs body(begin, end) over [0, n) split into fixed-size chunks.
/// Chunk boundaries depend only on (n, chunk_size), never on the worker
/// count, so per-chunk results can be reduced in chunk order to get
/// bit-identical output for any thread count.
void parallel_for_chunks(std::size_t n, std::size_t chunk_size,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace catsense
