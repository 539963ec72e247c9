#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fwstack::detail {

/// Run f(i) for i in [0, count) on up to `jobs` threads (0 = hardware
/// concurrency). Work items must be independent; callers index into
/// pre-sized output slots so aggregation order never depends on scheduling.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& f) {
    if (count == 0) return;
    unsigned n_threads = jobs > 0 ? static_cast<unsigned>(jobs) : std::thread::hardware_concurrency();
    if (n_threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(count));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace fwstack::detail
