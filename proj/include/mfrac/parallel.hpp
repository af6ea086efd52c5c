#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mfrac {

/// Global degree used by the operator kernels; set once by the CLI
/// --threads flag before any evaluation.
int parallel_threads();
void set_parallel_threads(int t);

/// Static block partition over [0, count). Every index is processed by
/// exactly one worker and each per-index computation is self-contained,
/// so outputs are bitwise identical for every thread count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t t =
        std::min<std::size_t>(static_cast<std::size_t>(parallel_threads()),
                              count == 0 ? 1 : count);
    if (t <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (count + t - 1) / t;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t w = 0; w < t; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(count, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] {
            for (std::size_t i = b; i < e; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace mfrac
