// parallel.hpp
// Static-partition parallel loop. Work items write to their own slots, so the
// result never depends on thread count or completion order.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace phasekey {

inline unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Calls fn(i) for every i in [0, n). Exceptions from workers are rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = default_thread_count()) {
    threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace phasekey
