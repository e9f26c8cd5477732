#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace wlab {

/// Worker count used by data-parallel loops; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(begin, end) on contiguous chunks of [0, n). Results must be
/// written by index so the output does not depend on the worker count.
template <class Body>
void parallel_chunks(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n / 256, 1));
    if (workers <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& t : pool) t.join();
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    parallel_chunks(n, [&fn](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

}  // namespace wlab
