#include "jsaforge/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jsaforge {

void parallel_rows(std::size_t rows, unsigned threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(rows, 1));
    if (workers == 1) {
        for (std::size_t r = 0; r < rows; ++r) body(r);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = rows * w / workers;
            const std::size_t end = rows * (w + 1) / workers;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t r = begin; r < end; ++r) body(r);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace jsaforge
