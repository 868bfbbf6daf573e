#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dialogos {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Child seed for a named stream under a parent seed. Streams are keyed by
// name rather than position so that two harnesses that hold the same
// components in different containers still draw identical numbers.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream) noexcept {
    return mix_seed(parent ^ fnv1a(stream));
}

// Per-dialogue seed: run seed + dialogue index.
constexpr std::uint64_t dialogue_seed(std::uint64_t run_seed, std::uint64_t dialogue_index) noexcept {
    return run_seed + dialogue_index;
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Uniform integer in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace dialogos
