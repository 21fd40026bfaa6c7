#pragma once

#include <vector>

#include "ptm/bitvector.hpp"
#include "ptm/dispersion.hpp"

namespace ptm {

/// Converged (or iteration-capped) K-medoid state for one class.
struct ClusterResult {
    std::vector<int> medoid_indices;         // K datapoint indices
    std::vector<int> assignment;             // per point, cluster id in [0, K)
    int iterations = 0;                      // update passes performed
    bool converged = false;                  // medoid set unchanged between passes
    std::vector<long long> objective_history; // sum of distances to own medoid,
                                              // recorded after every assign pass
};

/// Maps each point to its nearest medoid by Hamming distance. Ties go to the
/// lowest medoid position; a point that *is* a medoid always goes to its own
/// cluster (keeps clusters non-empty even when two medoids share a bit
/// pattern).
std::vector<int> assign(const std::vector<BitVector>& points,
                        const std::vector<int>& medoid_indices);

/// The member minimizing the sum of Hamming distances to all other members.
/// Ties go to the lowest datapoint index.
int update_medoid(const std::vector<BitVector>& points,
                  const std::vector<int>& member_indices);

/// Alternates assign/update until the medoid set is unchanged between
/// consecutive passes or max_iterations is reached. The clustering objective
/// never increases between recorded entries.
ClusterResult cluster(const std::vector<BitVector>& points,
                      const SelectionChromosome& initial_medoids,
                      int max_iterations = 100);

} // namespace ptm
