#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace conflate {

// Worker count: min(hardware, CONFLATE_THREADS if set).  CONFLATE_THREADS=1
// disables threading entirely.
inline unsigned thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("CONFLATE_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return n;
}

// Runs body(i) for i in [0, n).  Work is split into fixed-size chunks handed
// out to threads; results must be written to per-index slots so the outcome
// is identical for any thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned workers = thread_count();
    if (workers <= 1 || n < 4096) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t chunk = 4096;
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            std::size_t end = std::min(begin + chunk, n);
            for (std::size_t i = begin; i < end; ++i) body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

// Deterministic sum of f(i) over [0, n): per-chunk partials are computed in
// index order and combined in chunk order, independent of thread count.
template <class F>
double parallel_sum(std::size_t n, F&& f) {
    const std::size_t chunk = 4096;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
    parallel_for(nchunks, [&](std::size_t c) {
        double s = 0.0;
        const std::size_t end = std::min((c + 1) * chunk, n);
        for (std::size_t i = c * chunk; i < end; ++i) s += f(i);
        partial[c] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace conflate
