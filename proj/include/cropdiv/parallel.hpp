#pragma once

#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace cropdiv {

/// Resolves a thread-count flag: 0 means hardware concurrency, minimum 1.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Each chunk is
/// disjoint, so functions that write only to their own index range need no
/// synchronization and produce the same bytes for any thread count.
template <typename Fn>
void parallel_chunks(Eigen::Index n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (n <= 0) return;
    if (threads == 1 || n == 1) {
        fn(Eigen::Index{0}, n);
        return;
    }
    const Eigen::Index n_chunks = std::min<Eigen::Index>(threads, n);
    const Eigen::Index base = n / n_chunks;
    const Eigen::Index rem = n % n_chunks;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_chunks));
    Eigen::Index begin = 0;
    for (Eigen::Index k = 0; k < n_chunks; ++k) {
        const Eigen::Index len = base + (k < rem ? 1 : 0);
        const Eigen::Index end = begin + len;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

} // namespace cropdiv
