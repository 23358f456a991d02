// Copyright 2026 The Delight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "delight/common.hpp"

namespace delight {

// Deterministic RNG with explicit distribution code so results do not depend
// on the standard library implementation. Streams are derived from a root
// seed plus a string tag (and optional counter), which makes every consumer
// of randomness stateless and restartable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {
        // warm up so nearby seeds decorrelate
        for (int i = 0; i < 4; ++i) next_u64();
    }

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    real uniform() {
        return static_cast<real>(next_u64() >> 11) * 0x1.0p-53;
    }

    real uniform(real lo, real hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift; bias is negligible for desk-scale n
        return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    // standard normal via Box-Muller (no cached spare: keeps the stream
    // position a pure function of the draw count)
    real normal() {
        real u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        real u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    real normal(real mean, real stddev) { return mean + stddev * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_tag(const std::string& tag) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Derives an independent stream from (seed, tag, counter).
inline Rng stream(std::uint64_t seed, const std::string& tag, std::uint64_t counter = 0) {
    std::uint64_t s = seed;
    s ^= hash_tag(tag) + 0x9e3779b97f4a7c15ull + (s << 6) + (s >> 2);
    s ^= (counter + 0x165667b19e3779f9ull) + (s << 6) + (s >> 2);
    return Rng(s);
}

} // namespace delight
