#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace swelab {

/// Runs fn(begin, end) on disjoint chunks of [0, n) across up to `threads`
/// workers. With threads <= 1 the call is inline.
inline void parallel_chunks(std::size_t n, unsigned threads,
                            const std::function<void(std::size_t, std::size_t, unsigned)>& fn) {
    if (threads <= 1 || n < 2) {
        fn(0, n, 0);
        return;
    }
    const unsigned workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi, w);
    }
    for (auto& t : pool) t.join();
}

} // namespace swelab
