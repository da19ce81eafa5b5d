#pragma once

// Seed derivation and the few distributions the simulator needs. Everything
// here is bit-exact across platforms: the library distributions in <random>
// are implementation-defined, so uniform doubles and bounded integers are
// produced directly from the engine output.

#include <cstdint>
#include <random>
#include <string_view>

namespace clubandit {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, used to turn stream names into tags.
inline constexpr std::uint64_t stream_tag(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Child seed for an independent stream: splitmix64(root ^ tag), then mixed
/// with the index. Runs use root = seed + run_index.
inline constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                           std::uint64_t index = 0) noexcept {
    return splitmix64(splitmix64(root ^ stream_tag(stream)) + index);
}

inline Rng make_rng(std::uint64_t root, std::string_view stream, std::uint64_t index = 0) {
    return Rng(derive_seed(root, stream, index));
}

/// Uniform double in [0, 1) with 53 random bits.
template <std::uniform_random_bit_generator G>
double uniform01(G& g) {
    static_assert(G::max() - G::min() == ~std::uint64_t{0}, "64-bit engine expected");
    return static_cast<double>((g() - G::min()) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection sampling.
template <std::uniform_random_bit_generator G>
std::uint64_t uniform_index(G& g, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
        r = g() - G::min();
    } while (r >= limit);
    return r % n;
}

template <std::uniform_random_bit_generator G>
int bernoulli(G& g, double p) {
    return uniform01(g) < p ? 1 : 0;
}

}  // namespace clubandit
