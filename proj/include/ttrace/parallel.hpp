#pragma once

#include <complex>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ttrace {

// Number of worker threads, capped by TOEPLITZ_TRACE_THREADS when set.
inline int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 1 : static_cast<int>(hw);
    if (n > 8) n = 8;
    if (const char* env = std::getenv("TOEPLITZ_TRACE_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

// Run body(i) for i in [0, count). Work is split into contiguous blocks, one
// per thread; the body must only write to slots it owns.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    int nt = thread_cap();
    if (nt <= 1 || count < 256) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t block = (count + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = t * block;
        std::size_t hi = lo + block < count ? lo + block : count;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Pairwise summation: deterministic regardless of thread count, and far more
// accurate than a running sum on long node lists.
template <typename T>
T pairwise_sum(const T* data, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T s = data[0];
        for (std::size_t i = 1; i < n; ++i) s += data[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v.data(), v.size());
}

}  // namespace ttrace
