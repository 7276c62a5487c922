#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace interpol::rng {

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

// Unbiased draw from [0, n) by rejection on the raw 64-bit stream.
// std::uniform_int_distribution is implementation-defined, which would break
// byte-reproducibility of generated logs across standard libraries.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t r = eng();
        if (r >= threshold) return r % n;
    }
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Engine& eng, double p) { return uniform_unit(eng) < p; }

// Fisher-Yates, driven by uniform_below for the same reproducibility reason.
template <typename T>
void shuffle(std::vector<T>& values, Engine& eng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(eng, i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace interpol::rng
