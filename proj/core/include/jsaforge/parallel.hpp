#pragma once

#include <cstddef>
#include <functional>

namespace jsaforge {

// Calls body(row) for every row in [0, rows), split into contiguous blocks
// over `threads` workers. Each row must only touch its own output, which keeps
// results independent of the thread count.
void parallel_rows(std::size_t rows, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace jsaforge
