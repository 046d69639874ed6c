#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plmix {

inline std::size_t worker_count(std::size_t task_count) {
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("PLMIX_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = static_cast<std::size_t>(v);
    }
    return std::min(task_count, hw);
}

/// Runs fn(0..count-1) across a small pool. Callers write each result into
/// its own index slot, so reduction order is fixed by index regardless of
/// scheduling. The first exception is rethrown after the pool joins.
template <typename Fn>
void parallel_for_indexed(std::size_t count, Fn&& fn) {
    if (count == 0) return;
    const std::size_t threads = worker_count(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace plmix
