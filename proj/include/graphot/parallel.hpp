#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace graphot {

/// Runs fn(begin, end) over a partition of [0, n) on the requested number of
/// threads. The chunks are disjoint, so results must be written to disjoint
/// locations; output is then identical to the sequential run.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2 * threads) {
        fn(0, n);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 1; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    fn(0, std::min(n, chunk));
    for (std::thread& t : pool) t.join();
}

}  // namespace graphot
