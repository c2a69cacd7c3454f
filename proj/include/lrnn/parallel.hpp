#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace lrnn {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Iterations must be
/// independent; each index is visited exactly once. Worker w visits the
/// indices i with i % workers == w, workers = clamp(jobs, 1, n).
template <typename Body>
void parallel_for(std::ptrdiff_t n, int jobs, Body&& body) {
    if (n <= 0) return;
    const std::ptrdiff_t workers = std::clamp<std::ptrdiff_t>(jobs, 1, n);
    if (workers == 1) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(std::size_t(workers));
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::ptrdiff_t i = w; i < n; i += workers) body(i);
        });
    }
}

} // namespace lrnn
