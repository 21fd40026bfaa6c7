#pragma once

#include <vector>

#include "ptm/bitvector.hpp"
#include "ptm/dataset.hpp"
#include "ptm/ga.hpp"
#include "ptm/kmedoid.hpp"

namespace ptm {

/// Per-class placement of clusters into machine columns: rows[c][k] is the
/// cluster id of class c placed at column k. Every row is a permutation of
/// [0, K); row 0 is pinned to the identity, which quotients out the
/// column-relabeling symmetry (search space (K!)^(C-1)).
struct Arrangement {
    std::vector<std::vector<int>> rows;

    int classes() const { return static_cast<int>(rows.size()); }
    int columns() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }

    static Arrangement identity(int classes, int columns);
    void validate() const;

    bool operator==(const Arrangement&) const = default;
};

/// C x K grid of medoid bit patterns after arranging: column k holds one
/// medoid per class, and cluster_of[c][k] remembers which of class c's
/// clusters landed there.
struct MedoidGrid {
    std::vector<std::vector<BitVector>> medoids; // [class][column]
    std::vector<std::vector<int>> cluster_of;    // [class][column] -> cluster id

    int classes() const { return static_cast<int>(medoids.size()); }
    int columns() const { return medoids.empty() ? 0 : static_cast<int>(medoids[0].size()); }
    void validate() const;
};

/// Sum over columns of all unordered pairwise Hamming distances among the C
/// medoids stacked in that column.
long long alignment_score(const MedoidGrid& grid);

/// Arranges medoids_per_class (indexed [class][cluster id]) according to
/// `arrangement`.
MedoidGrid make_grid(const std::vector<std::vector<BitVector>>& medoids_per_class,
                     const Arrangement& arrangement);

/// Genetic search over arrangements maximizing alignment_score. Deterministic
/// per cfg.seed; the result never scores below the identity arrangement
/// (identity is seeded into the initial population). K == 1 or C == 1 returns
/// identity directly.
Arrangement align(const std::vector<std::vector<BitVector>>& medoids_per_class,
                  const GaConfig& cfg, GaTrace* trace = nullptr);

/// Computes, for each machine column, the original dataset indices of the
/// points it receives: the class-c points of cluster j go to the column where
/// `arrangement` placed cluster j of class c. cluster_results[c].assignment
/// is indexed by class-local point position, i.e. entry p refers to dataset
/// point indices_by_class()[c][p]. Indices inside each output list are
/// ascending (original dataset order); the lists are an exact set-partition
/// of [0, dataset.size()).
std::vector<std::vector<int>> partition_indices(const BinaryDataset& dataset,
                                                const std::vector<ClusterResult>& cluster_results,
                                                const Arrangement& arrangement);

/// Materializes per-machine datasets from index lists (as produced by
/// partition_indices).
std::vector<BinaryDataset> gather(const BinaryDataset& dataset,
                                  const std::vector<std::vector<int>>& members);

/// gather(partition_indices(...)) plus the guarantee check that every output
/// contains every class.
std::vector<BinaryDataset> partition(const BinaryDataset& dataset,
                                     const std::vector<ClusterResult>& cluster_results,
                                     const Arrangement& arrangement);

namespace detail {
// Permutation operators exposed for validity fuzzing in tests.

// Order crossover: copies a random segment of `a`, fills the rest with the
// remaining values in `b`'s order.
std::vector<int> order_crossover(const std::vector<int>& a, const std::vector<int>& b,
                                 Rng& rng);

// Swaps two distinct positions of one random non-pinned row.
void arrangement_mutate(Arrangement& arr, Rng& rng);

} // namespace detail

} // namespace ptm
