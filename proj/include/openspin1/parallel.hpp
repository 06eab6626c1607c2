#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace openspin1 {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Applies fn to every item on a small thread pool; results keep the input order.
/// The first exception thrown by any worker is rethrown after all workers join.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, Fn fn, unsigned workers = default_workers())
    -> std::vector<decltype(fn(items.front()))> {
    using R = decltype(fn(items.front()));
    std::vector<R> out(items.size());
    if (items.empty()) return out;
    workers = std::max(1u, std::min<unsigned>(workers, unsigned(items.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < items.size();) {
            try {
                out[i] = fn(items[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace openspin1
