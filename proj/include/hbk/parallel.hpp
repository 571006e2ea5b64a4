#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hbk {

namespace detail {
inline std::atomic<int>& thread_setting() {
    static std::atomic<int> n{-1};
    return n;
}
}  // namespace detail

/// 0 means "use hardware concurrency". Negative restores the HBK_THREADS fallback.
inline void set_thread_count(int n) { detail::thread_setting() = n; }

inline int thread_count() {
    int n = detail::thread_setting();
    if (n < 0) {
        n = 0;
        if (const char* env = std::getenv("HBK_THREADS")) {
            try {
                n = std::max(0, std::stoi(env));
            } catch (...) {
                n = 0;
            }
        }
    }
    if (n == 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return n;
}

/// Runs body(i) for i in [0, n). Each index is handled by exactly one thread,
/// so any per-index reduction stays bit-identical across thread counts.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!err) err = std::current_exception();
            next = n;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (std::size_t t = 0; t + 1 < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

/// Pairwise (tree) sum of v[0..n), in place. Fixed order, independent of threads.
template <class T>
T pairwise_sum(std::vector<T>& v) {
    if (v.empty()) return T{};
    std::size_t n = v.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n % 2) v[half] = v[n - 1];
        n = half + n % 2;
    }
    return v[0];
}

}  // namespace hbk
