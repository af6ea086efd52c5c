#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mfrac {

/// Deterministic random source. mt19937_64 sequencing with explicit
/// double extraction; the standard distributions are not portable across
/// library implementations, so we never use them.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Log-uniform on [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Uniform integer in [0, n). Plain modulo; the bias is irrelevant at
    /// the n used here and the result is platform-independent.
    std::uint64_t below(std::uint64_t n) { return eng_() % n; }

private:
    std::mt19937_64 eng_;
};

} // namespace mfrac
