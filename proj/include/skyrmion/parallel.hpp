#pragma once

// Row-parallel loops with reductions that do not depend on the thread count.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace skyrmion {

/// Worker count: SKYR_THREADS if set and positive, else hardware concurrency
/// capped at 8.
inline unsigned thread_count() {
    if (const char* env = std::getenv("SKYR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(std::min(v, 256L));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return std::clamp(hw, 1u, 8u);
}

/// Calls fn(j) for every j in [0, n). Each j is handled by exactly one worker,
/// so writes to disjoint per-row outputs need no synchronization.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1 || n < 16) {
        for (std::size_t j = 0; j < n; ++j) fn(j);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    auto chunk = [&](std::size_t w) {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        for (std::size_t j = lo; j < hi; ++j) fn(j);
    };
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(chunk, w);
    chunk(0);
    for (auto& t : pool) t.join();
}

/// Pairwise sum; the association order depends only on the length.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

/// Sum of row(j) over j in [0, n), bit-reproducible for any thread count.
template <class RowFn>
double row_sum(std::size_t n, RowFn&& row) {
    std::vector<double> partial(n, 0.0);
    parallel_for(n, [&](std::size_t j) { partial[j] = row(j); });
    return pairwise_sum(partial);
}

}  // namespace skyrmion
