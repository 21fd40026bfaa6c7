#include "ptm/kmedoid.hpp"

#include <algorithm>
#include <string>

namespace ptm {

namespace {

void check_medoids(int n, const std::vector<int>& medoids) {
    if (medoids.empty()) throw ContractError("kmedoid: no medoids given");
    if (static_cast<int>(medoids.size()) > n)
        throw ContractError("kmedoid: K=" + std::to_string(medoids.size()) +
                            " exceeds " + std::to_string(n) + " points");
    std::vector<int> sorted = medoids;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] >= n)
            throw ContractError("kmedoid: medoid index " + std::to_string(sorted[i]) +
                                " out of range");
        if (i > 0 && sorted[i] == sorted[i - 1])
            throw ContractError("kmedoid: duplicate medoid index " +
                                std::to_string(sorted[i]));
    }
}

long long objective(const std::vector<BitVector>& points,
                    const std::vector<int>& medoids, const std::vector<int>& assignment) {
    long long total = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        total += hamming_distance(
            points[i], points[static_cast<std::size_t>(
                           medoids[static_cast<std::size_t>(assignment[i])])]);
    return total;
}

} // namespace

std::vector<int> assign(const std::vector<BitVector>& points,
                        const std::vector<int>& medoid_indices) {
    const int n = static_cast<int>(points.size());
    const int k = static_cast<int>(medoid_indices.size());
    check_medoids(n, medoid_indices);

    // Medoid points claim their own cluster up front.
    std::vector<int> cluster_of_point(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < k; ++j)
        cluster_of_point[static_cast<std::size_t>(medoid_indices[static_cast<std::size_t>(j)])] = j;

    for (int i = 0; i < n; ++i) {
        if (cluster_of_point[static_cast<std::size_t>(i)] != -1) continue;
        int best_j = 0;
        int best_d = hamming_distance(points[static_cast<std::size_t>(i)],
                                      points[static_cast<std::size_t>(medoid_indices[0])]);
        for (int j = 1; j < k; ++j) {
            const int d = hamming_distance(
                points[static_cast<std::size_t>(i)],
                points[static_cast<std::size_t>(medoid_indices[static_cast<std::size_t>(j)])]);
            if (d < best_d) { // ties keep the lowest medoid position
                best_d = d;
                best_j = j;
            }
        }
        cluster_of_point[static_cast<std::size_t>(i)] = best_j;
    }
    return cluster_of_point;
}

int update_medoid(const std::vector<BitVector>& points,
                  const std::vector<int>& member_indices) {
    if (member_indices.empty())
        throw ContractError("update_medoid: empty cluster");
    int best = member_indices[0];
    long long best_cost = -1;
    for (int candidate : member_indices) {
        long long cost = 0;
        for (int other : member_indices)
            cost += hamming_distance(points[static_cast<std::size_t>(candidate)],
                                     points[static_cast<std::size_t>(other)]);
        if (best_cost < 0 || cost < best_cost ||
            (cost == best_cost && candidate < best)) {
            best_cost = cost;
            best = candidate;
        }
    }
    return best;
}

ClusterResult cluster(const std::vector<BitVector>& points,
                      const SelectionChromosome& initial_medoids, int max_iterations) {
    const int n = static_cast<int>(points.size());
    const int k = static_cast<int>(initial_medoids.indices.size());
    check_medoids(n, initial_medoids.indices);
    if (max_iterations < 1)
        throw ContractError("kmedoid: max_iterations must be positive");

    ClusterResult result;
    result.medoid_indices = initial_medoids.indices;
    result.assignment = assign(points, result.medoid_indices);
    result.objective_history.push_back(
        objective(points, result.medoid_indices, result.assignment));

    for (int iter = 1; iter <= max_iterations; ++iter) {
        std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
        for (int i = 0; i < n; ++i)
            members[static_cast<std::size_t>(result.assignment[static_cast<std::size_t>(i)])]
                .push_back(i);

        std::vector<int> new_medoids(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j)
            new_medoids[static_cast<std::size_t>(j)] =
                update_medoid(points, members[static_cast<std::size_t>(j)]);

        result.iterations = iter;
        if (new_medoids == result.medoid_indices) {
            result.converged = true;
            break;
        }
        result.medoid_indices = std::move(new_medoids);
        result.assignment = assign(points, result.medoid_indices);
        result.objective_history.push_back(
            objective(points, result.medoid_indices, result.assignment));
    }
    return result;
}

} // namespace ptm
