#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ageflow {

/// Runs fn(0..n-1) across up to `jobs` threads (0 = hardware concurrency).
/// The first exception thrown by any task is rethrown after the join.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    int n_threads = std::max(1, std::min(jobs, n));
    if (n_threads <= 1) {
        for (int k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<int> cursor{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            int k = cursor.fetch_add(1);
            if (k >= n) return;
            try {
                fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ageflow
