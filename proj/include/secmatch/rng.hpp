#pragma once

#include <cstdint>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

namespace secmatch {

using Rng = std::mt19937_64;

/// Named randomness streams. Each (master seed, trial, stream) triple gets its
/// own generator so order sampling never shares draws with coin flips.
enum class Stream : std::uint64_t {
    instance = 1,
    order = 2,
    coins = 3,
    inner = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, Stream stream) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    return h;
}

inline Rng make_rng(std::uint64_t master, std::uint64_t trial, Stream stream) {
    return Rng(derive_seed(master, trial, stream));
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform integer in [lo, hi].
inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Uniform permutation of 0..n-1 (Fisher-Yates).
template <class Int = std::uint32_t>
std::vector<Int> random_permutation(std::size_t n, Rng& rng) {
    std::vector<Int> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Int>(i);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[uniform_index(rng, 0, i - 1)]);
    return p;
}

}  // namespace secmatch
