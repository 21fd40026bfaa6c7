#include "ptm/dispersion.hpp"

#include <algorithm>
#include <string>

namespace ptm {

long long dispersion_score(const std::vector<BitVector>& points,
                           const std::vector<int>& indices) {
    const int n = static_cast<int>(points.size());
    std::vector<int> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const int v = sorted[i];
        if (v < 0 || v >= n)
            throw ContractError("dispersion_score: index " + std::to_string(v) +
                                " out of range for " + std::to_string(n) + " points");
        if (i > 0 && sorted[i] == sorted[i - 1])
            throw ContractError("dispersion_score: duplicate index " + std::to_string(v));
    }
    long long total = 0;
    for (std::size_t i = 0; i < indices.size(); ++i)
        for (std::size_t j = i + 1; j < indices.size(); ++j)
            total += hamming_distance(points[static_cast<std::size_t>(indices[i])],
                                      points[static_cast<std::size_t>(indices[j])]);
    return total;
}

namespace detail {

SelectionChromosome selection_crossover(const SelectionChromosome& a,
                                        const SelectionChromosome& b, int k, Rng& rng) {
    SelectionChromosome child;
    child.indices.reserve(a.indices.size() + b.indices.size());
    std::set_union(a.indices.begin(), a.indices.end(), b.indices.begin(), b.indices.end(),
                   std::back_inserter(child.indices));
    while (static_cast<int>(child.indices.size()) > k) {
        const int drop = rand_index(rng, static_cast<int>(child.indices.size()));
        child.indices.erase(child.indices.begin() + drop);
    }
    return child;
}

void selection_mutate(SelectionChromosome& c, int n, Rng& rng) {
    const int k = static_cast<int>(c.indices.size());
    if (k == 0 || k >= n) return; // no non-member exists
    const int pos = rand_index(rng, k);
    // Pick the t-th smallest value of [0, n) \ members; c.indices is sorted,
    // so skipping past members in order turns the rank into a value.
    int candidate = rand_index(rng, n - k);
    for (int m : c.indices) {
        if (m <= candidate)
            ++candidate;
        else
            break;
    }
    c.indices[static_cast<std::size_t>(pos)] = candidate;
    std::sort(c.indices.begin(), c.indices.end());
}

} // namespace detail

SelectionChromosome max_dispersion(const std::vector<BitVector>& points, int k,
                                   const GaConfig& cfg, GaTrace* trace) {
    const int n = static_cast<int>(points.size());
    if (k < 1) throw ContractError("max_dispersion: K must be at least 1");
    if (k > n)
        throw ContractError("max_dispersion: K=" + std::to_string(k) + " exceeds " +
                            std::to_string(n) + " available points");

    if (k == n) {
        // Only one chromosome exists; no search needed.
        SelectionChromosome full;
        full.indices.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) full.indices[static_cast<std::size_t>(i)] = i;
        if (trace)
            trace->best_per_generation.push_back(dispersion_score(points, full.indices));
        return full;
    }

    return run_ga<SelectionChromosome>(
        cfg,
        [&](Rng& rng) {
            SelectionChromosome c;
            c.indices = sample_distinct(rng, n, k);
            return c;
        },
        [&](const SelectionChromosome& c) { return dispersion_score(points, c.indices); },
        [&](const SelectionChromosome& a, const SelectionChromosome& b, Rng& rng) {
            return detail::selection_crossover(a, b, k, rng);
        },
        [&](SelectionChromosome& c, Rng& rng) { detail::selection_mutate(c, n, rng); },
        [](const SelectionChromosome& a, const SelectionChromosome& b) {
            return a.indices < b.indices;
        },
        trace);
}

} // namespace ptm
