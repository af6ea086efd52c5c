#include "mfrac/parallel.hpp"

#include <atomic>

namespace mfrac {

namespace {
std::atomic<int> g_threads{1};
}

int parallel_threads() { return g_threads.load(std::memory_order_relaxed); }

void set_parallel_threads(int t) { g_threads.store(t < 1 ? 1 : t, std::memory_order_relaxed); }

} // namespace mfrac
