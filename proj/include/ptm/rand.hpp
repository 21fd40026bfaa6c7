#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "ptm/errors.hpp"

namespace ptm {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Spreads correlated inputs across the 64-bit space.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent deterministic substreams of one master seed. Domain tags keep
// e.g. the split shuffle and per-machine training streams decorrelated.
enum class SeedDomain : std::uint64_t {
    Split = 1,
    Dispersion = 2,
    Alignment = 3,
    Machine = 4,
    Run = 5,
    Data = 6,
};

inline std::uint64_t derive_seed(std::uint64_t master, SeedDomain domain,
                                 std::uint64_t index = 0) {
    return mix64(master ^ mix64((static_cast<std::uint64_t>(domain) << 48) ^ index));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Unbiased draw in [0, n). Hand-rolled (Lemire rejection) so results do not
// depend on the standard library's distribution implementations.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
    if (n == 0) throw ContractError("rand_below: n must be positive");
    using u128 = unsigned __int128;
    std::uint64_t x = rng();
    u128 m = static_cast<u128>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        const std::uint64_t threshold = -n % n;
        while (lo < threshold) {
            x = rng();
            m = static_cast<u128>(x) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

inline int rand_index(Rng& rng, int n) {
    return static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n)));
}

// Uniform double in [0, 1).
inline double rand_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates, self-contained for cross-platform reproducibility.
template <typename T>
void shuffle_in_place(Rng& rng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = rand_below(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

inline std::vector<int> shuffled_indices(Rng& rng, int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    shuffle_in_place(rng, idx);
    return idx;
}

// k distinct values from [0, n), sorted ascending (Floyd's algorithm).
inline std::vector<int> sample_distinct(Rng& rng, int n, int k) {
    if (k < 0 || k > n) throw ContractError("sample_distinct: k out of range");
    std::vector<int> chosen;
    chosen.reserve(k);
    for (int j = n - k; j < n; ++j) {
        const int t = rand_index(rng, j + 1);
        bool present = false;
        for (int c : chosen) {
            if (c == t) { present = true; break; }
        }
        chosen.push_back(present ? j : t);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

} // namespace ptm
