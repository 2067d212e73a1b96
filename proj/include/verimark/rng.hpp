#pragma once

#include <cstdint>

#include "verimark/bytes.hpp"

namespace verimark {

/// SplitMix64 generator. Chosen over <random> engines because scenario
/// reports must be byte-identical across platforms and standard library
/// distributions are not portable.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound). bound = 0 is a caller bug.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling keeps the result exactly uniform.
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform in [lo, hi] inclusive.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return lo + below(hi - lo + 1);
    }

    /// Bernoulli draw; consumes exactly one state advance.
    bool chance(double p) {
        if (p <= 0.0) {
            next();
            return false;
        }
        if (p >= 1.0) {
            next();
            return true;
        }
        return (next() >> 11) * 0x1.0p-53 < p;
    }

    double uniform01() { return (next() >> 11) * 0x1.0p-53; }

    Bytes bytes(std::size_t n) {
        Bytes out;
        out.reserve(n);
        while (out.size() < n) {
            std::uint64_t w = next();
            for (int i = 0; i < 8 && out.size() < n; ++i)
                out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
        }
        return out;
    }

    /// Independent child stream. Forking advances this stream once.
    SplitMix64 fork() { return SplitMix64(next() ^ 0xa5a5a5a5a5a5a5a5ULL); }

private:
    std::uint64_t state_;
};

}  // namespace verimark
