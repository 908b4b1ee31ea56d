#pragma once

#include <atomic>
#include <thread>

#include "pflab/common.hpp"

namespace pflab {

// Run fn(i) for i in [0, count) on up to `workers` threads. Jobs must be
// independent and write only to their own slots; results are therefore
// identical for any worker count. The first exception is rethrown after all
// jobs finish.
template <class Fn>
void run_jobs(std::size_t count, int workers, Fn&& fn) {
    if (count == 0) return;
    workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    if (!errors[static_cast<std::size_t>(w)])
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace pflab
