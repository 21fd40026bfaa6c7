#pragma once

#include <vector>

#include "ptm/bitvector.hpp"
#include "ptm/ga.hpp"

namespace ptm {

/// K distinct datapoint indices within one class, kept sorted ascending.
struct SelectionChromosome {
    std::vector<int> indices;

    bool operator==(const SelectionChromosome&) const = default;
};

/// Cumulative pairwise Hamming distance over the selected points (all
/// unordered pairs). Indices must be distinct and in range.
long long dispersion_score(const std::vector<BitVector>& points,
                           const std::vector<int>& indices);

/// Genetic search for the K-subset maximizing dispersion_score. Returns the
/// best chromosome seen across all generations; deterministic for a given
/// cfg.seed; the result scores at least as high as every member of the
/// random initial population. K == points.size() returns the full index set.
SelectionChromosome max_dispersion(const std::vector<BitVector>& points, int k,
                                   const GaConfig& cfg, GaTrace* trace = nullptr);

namespace detail {
// Operators exposed for validity fuzzing in tests.

// Union of two K-subsets, randomly thinned back down to K elements.
SelectionChromosome selection_crossover(const SelectionChromosome& a,
                                        const SelectionChromosome& b, int k, Rng& rng);

// Replaces one member with a uniformly random non-member from [0, n).
void selection_mutate(SelectionChromosome& c, int n, Rng& rng);

} // namespace detail

} // namespace ptm
