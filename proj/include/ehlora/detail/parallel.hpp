#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ehlora::detail {

// Runs f(begin, end) over contiguous blocks of [0, n). Blocks are disjoint, so
// results written by index do not depend on the thread count. The first
// exception thrown by a worker is rethrown on the calling thread.
template <class F>
void parallel_blocks(std::size_t n, int threads, F&& f) {
    const std::size_t t = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
    if (t == 1) {
        f(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + t - 1) / t;
    std::vector<std::exception_ptr> errors(t);
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < t; ++k) {
        const std::size_t lo = std::min(n, k * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, k, lo, hi] {
            try {
                f(lo, hi);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace ehlora::detail
