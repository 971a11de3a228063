// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace rmtimg {

namespace {
std::atomic<int> g_threads{0};
thread_local bool t_inside_parallel = false;
}

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
    const int n = g_threads.load();
    if (n > 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

void parallel_for_chunks(std::int64_t begin, std::int64_t end, std::int64_t chunk,
                         const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (end <= begin) return;
    const int workers = thread_count();
    // Nested regions run sequentially; the outer loop owns the workers.
    if (workers <= 1 || end - begin <= chunk || t_inside_parallel) {
        for (std::int64_t lo = begin; lo < end; lo += chunk)
            fn(lo, std::min(lo + chunk, end));
        return;
    }
    std::atomic<std::int64_t> next{begin};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        t_inside_parallel = true;
        for (;;) {
            const std::int64_t lo = next.fetch_add(chunk);
            if (lo >= end || failed.load()) break;
            try {
                fn(lo, std::min(lo + chunk, end));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                break;
            }
        }
        t_inside_parallel = false;
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn) {
    parallel_for_chunks(begin, end, 1, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
}

}  // namespace rmtimg
