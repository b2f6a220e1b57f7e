// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mlcspace {

// 0 means "decide": MLCSPACE_THREADS if set, else the hardware concurrency.
inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0) { return requested; }
    if (char const* env = std::getenv("MLCSPACE_THREADS")) {
        long const v = std::strtol(env, nullptr, 10);
        if (v > 0) { return static_cast<unsigned>(v); }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

// Runs f(i) for i in [0, n). Work is handed out dynamically; callers write results by index so
// the outcome does not depend on scheduling. The first exception is rethrown.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& f)
{
    threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) { f(i); }
        return;
    }
    std::atomic<std::size_t> next {0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) { error = std::current_exception(); }
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 1; t < threads; ++t) { pool.emplace_back(worker); }
    worker();
    for (auto& th : pool) { th.join(); }
    if (error) { std::rethrow_exception(error); }
}

} // namespace mlcspace
