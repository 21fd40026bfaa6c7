#include "ptm/alignment.hpp"

#include <algorithm>
#include <string>

namespace ptm {

Arrangement Arrangement::identity(int classes, int columns) {
    Arrangement arr;
    arr.rows.assign(static_cast<std::size_t>(classes), std::vector<int>());
    for (auto& row : arr.rows) {
        row.resize(static_cast<std::size_t>(columns));
        for (int k = 0; k < columns; ++k) row[static_cast<std::size_t>(k)] = k;
    }
    return arr;
}

void Arrangement::validate() const {
    if (rows.empty()) throw ContractError("arrangement: no rows");
    const int k = columns();
    std::vector<bool> seen;
    for (std::size_t c = 0; c < rows.size(); ++c) {
        const auto& row = rows[c];
        if (static_cast<int>(row.size()) != k)
            throw ContractError("arrangement: ragged row " + std::to_string(c));
        seen.assign(static_cast<std::size_t>(k), false);
        for (int v : row) {
            if (v < 0 || v >= k || seen[static_cast<std::size_t>(v)])
                throw ContractError("arrangement: row " + std::to_string(c) +
                                    " is not a permutation of [0, " + std::to_string(k) + ")");
            seen[static_cast<std::size_t>(v)] = true;
        }
    }
    for (int v = 0; v < k; ++v)
        if (rows[0][static_cast<std::size_t>(v)] != v)
            throw ContractError("arrangement: row 0 must be the identity");
}

void MedoidGrid::validate() const {
    if (medoids.empty()) throw ContractError("grid: no classes");
    const int k = columns();
    if (k == 0) throw ContractError("grid: no columns");
    if (cluster_of.size() != medoids.size())
        throw ContractError("grid: cluster_of/medoids class count mismatch");
    const int width = medoids[0][0].width();
    for (std::size_t c = 0; c < medoids.size(); ++c) {
        if (static_cast<int>(medoids[c].size()) != k ||
            static_cast<int>(cluster_of[c].size()) != k)
            throw ContractError("grid: ragged class " + std::to_string(c));
        for (const BitVector& m : medoids[c])
            if (m.width() != width) throw ContractError("grid: medoid width mismatch");
    }
}

long long alignment_score(const MedoidGrid& grid) {
    grid.validate();
    const int classes = grid.classes();
    const int k = grid.columns();
    long long total = 0;
    for (int col = 0; col < k; ++col)
        for (int c1 = 0; c1 < classes; ++c1)
            for (int c2 = c1 + 1; c2 < classes; ++c2)
                total += hamming_distance(
                    grid.medoids[static_cast<std::size_t>(c1)][static_cast<std::size_t>(col)],
                    grid.medoids[static_cast<std::size_t>(c2)][static_cast<std::size_t>(col)]);
    return total;
}

namespace {

void check_rectangular(const std::vector<std::vector<BitVector>>& medoids_per_class) {
    if (medoids_per_class.empty())
        throw ContractError("align: no classes");
    const std::size_t k = medoids_per_class[0].size();
    if (k == 0) throw ContractError("align: class 0 has no medoids");
    for (std::size_t c = 1; c < medoids_per_class.size(); ++c)
        if (medoids_per_class[c].size() != k)
            throw ContractError("align: ragged medoid input (class " + std::to_string(c) +
                                " has " + std::to_string(medoids_per_class[c].size()) +
                                " medoids, expected " + std::to_string(k) + ")");
}

} // namespace

MedoidGrid make_grid(const std::vector<std::vector<BitVector>>& medoids_per_class,
                     const Arrangement& arrangement) {
    check_rectangular(medoids_per_class);
    arrangement.validate();
    const int classes = static_cast<int>(medoids_per_class.size());
    const int k = static_cast<int>(medoids_per_class[0].size());
    if (arrangement.classes() != classes || arrangement.columns() != k)
        throw ContractError("make_grid: arrangement shape mismatch");

    MedoidGrid grid;
    grid.medoids.resize(static_cast<std::size_t>(classes));
    grid.cluster_of.resize(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) {
        for (int col = 0; col < k; ++col) {
            const int j = arrangement.rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(col)];
            grid.medoids[static_cast<std::size_t>(c)].push_back(
                medoids_per_class[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)]);
            grid.cluster_of[static_cast<std::size_t>(c)].push_back(j);
        }
    }
    return grid;
}

namespace detail {

std::vector<int> order_crossover(const std::vector<int>& a, const std::vector<int>& b,
                                 Rng& rng) {
    const int k = static_cast<int>(a.size());
    if (k <= 1) return a;
    int lo = rand_index(rng, k);
    int hi = rand_index(rng, k);
    if (lo > hi) std::swap(lo, hi);

    std::vector<int> child(static_cast<std::size_t>(k), -1);
    std::vector<bool> taken(static_cast<std::size_t>(k), false);
    for (int i = lo; i <= hi; ++i) {
        child[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)];
        taken[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])] = true;
    }
    std::size_t fill = 0;
    for (int v : b) {
        if (taken[static_cast<std::size_t>(v)]) continue;
        while (child[fill] != -1) ++fill;
        child[fill] = v;
    }
    return child;
}

void arrangement_mutate(Arrangement& arr, Rng& rng) {
    const int classes = arr.classes();
    const int k = arr.columns();
    if (classes < 2 || k < 2) return; // nothing mutable
    const int row = 1 + rand_index(rng, classes - 1);
    const int p = rand_index(rng, k);
    const int q = (p + 1 + rand_index(rng, k - 1)) % k;
    std::swap(arr.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(p)],
              arr.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(q)]);
}

} // namespace detail

Arrangement align(const std::vector<std::vector<BitVector>>& medoids_per_class,
                  const GaConfig& cfg, GaTrace* trace) {
    check_rectangular(medoids_per_class);
    const int classes = static_cast<int>(medoids_per_class.size());
    const int k = static_cast<int>(medoids_per_class[0].size());

    if (k == 1 || classes == 1) {
        const Arrangement id = Arrangement::identity(classes, k);
        if (trace)
            trace->best_per_generation.push_back(
                alignment_score(make_grid(medoids_per_class, id)));
        return id;
    }

    // Precomputed cross-class distance table: score evaluation inside the GA
    // is then pure table lookups.
    // dist[c1][c2][j1][j2] with c1 < c2: distance between cluster j1's medoid
    // of class c1 and cluster j2's medoid of class c2.
    std::vector<std::vector<std::vector<std::vector<int>>>> dist(
        static_cast<std::size_t>(classes));
    for (int c1 = 0; c1 < classes; ++c1) {
        dist[static_cast<std::size_t>(c1)].resize(static_cast<std::size_t>(classes));
        for (int c2 = c1 + 1; c2 < classes; ++c2) {
            auto& table = dist[static_cast<std::size_t>(c1)][static_cast<std::size_t>(c2)];
            table.assign(static_cast<std::size_t>(k),
                         std::vector<int>(static_cast<std::size_t>(k), 0));
            for (int j1 = 0; j1 < k; ++j1)
                for (int j2 = 0; j2 < k; ++j2)
                    table[static_cast<std::size_t>(j1)][static_cast<std::size_t>(j2)] =
                        hamming_distance(
                            medoids_per_class[static_cast<std::size_t>(c1)][static_cast<std::size_t>(j1)],
                            medoids_per_class[static_cast<std::size_t>(c2)][static_cast<std::size_t>(j2)]);
        }
    }
    const auto score = [&](const Arrangement& arr) {
        long long total = 0;
        for (int col = 0; col < k; ++col)
            for (int c1 = 0; c1 < classes; ++c1)
                for (int c2 = c1 + 1; c2 < classes; ++c2)
                    total += dist[static_cast<std::size_t>(c1)][static_cast<std::size_t>(c2)]
                                 [static_cast<std::size_t>(
                                     arr.rows[static_cast<std::size_t>(c1)][static_cast<std::size_t>(col)])]
                                 [static_cast<std::size_t>(
                                     arr.rows[static_cast<std::size_t>(c2)][static_cast<std::size_t>(col)])];
        return total;
    };

    // The identity arrangement is seeded as the first individual so the
    // search can never return anything that scores below it.
    bool seeded_identity = false;
    return run_ga<Arrangement>(
        cfg,
        [&](Rng& rng) {
            if (!seeded_identity) {
                seeded_identity = true;
                return Arrangement::identity(classes, k);
            }
            Arrangement arr = Arrangement::identity(classes, k);
            for (int c = 1; c < classes; ++c)
                shuffle_in_place(rng, arr.rows[static_cast<std::size_t>(c)]);
            return arr;
        },
        score,
        [&](const Arrangement& a, const Arrangement& b, Rng& rng) {
            Arrangement child = Arrangement::identity(classes, k);
            for (int c = 1; c < classes; ++c)
                child.rows[static_cast<std::size_t>(c)] = detail::order_crossover(
                    a.rows[static_cast<std::size_t>(c)], b.rows[static_cast<std::size_t>(c)], rng);
            return child;
        },
        [](Arrangement& arr, Rng& rng) { detail::arrangement_mutate(arr, rng); },
        [](const Arrangement& a, const Arrangement& b) { return a.rows < b.rows; },
        trace);
}

std::vector<std::vector<int>> partition_indices(const BinaryDataset& dataset,
                                                const std::vector<ClusterResult>& cluster_results,
                                                const Arrangement& arrangement) {
    dataset.validate();
    arrangement.validate();
    const int classes = dataset.num_classes;
    const int k = arrangement.columns();
    if (static_cast<int>(cluster_results.size()) != classes)
        throw ContractError("partition: expected one cluster result per class");
    if (arrangement.classes() != classes)
        throw ContractError("partition: arrangement class count mismatch");

    const auto by_class = dataset.indices_by_class();
    for (int c = 0; c < classes; ++c) {
        const auto& result = cluster_results[static_cast<std::size_t>(c)];
        if (result.assignment.size() != by_class[static_cast<std::size_t>(c)].size())
            throw ContractError("partition: cluster assignment size mismatch for class " +
                                std::to_string(c));
        if (static_cast<int>(result.medoid_indices.size()) != k)
            throw ContractError("partition: class " + std::to_string(c) + " has " +
                                std::to_string(result.medoid_indices.size()) +
                                " clusters, arrangement has " + std::to_string(k) +
                                " columns");
    }

    // column_of[c][j]: the machine column that receives cluster j of class c.
    std::vector<std::vector<int>> column_of(static_cast<std::size_t>(classes),
                                            std::vector<int>(static_cast<std::size_t>(k), -1));
    for (int c = 0; c < classes; ++c)
        for (int col = 0; col < k; ++col)
            column_of[static_cast<std::size_t>(c)][static_cast<std::size_t>(
                arrangement.rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(col)])] = col;

    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));

    // Scanning points in original order keeps each machine's member list
    // stable w.r.t. the input ordering; cursors track class-local positions.
    std::vector<std::size_t> cursor(static_cast<std::size_t>(classes), 0);
    for (int i = 0; i < dataset.size(); ++i) {
        const int c = dataset.labels[static_cast<std::size_t>(i)];
        const std::size_t p = cursor[static_cast<std::size_t>(c)]++;
        const int j = cluster_results[static_cast<std::size_t>(c)].assignment[p];
        if (j < 0 || j >= k)
            throw ContractError("partition: cluster id out of range for class " +
                                std::to_string(c));
        const int col = column_of[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
        members[static_cast<std::size_t>(col)].push_back(i);
    }
    return members;
}

std::vector<BinaryDataset> gather(const BinaryDataset& dataset,
                                  const std::vector<std::vector<int>>& members) {
    std::vector<BinaryDataset> machines(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
        auto& out = machines[m];
        out.num_classes = dataset.num_classes;
        out.width = dataset.width;
        out.points.reserve(members[m].size());
        out.labels.reserve(members[m].size());
        for (int i : members[m]) {
            if (i < 0 || i >= dataset.size())
                throw ContractError("gather: point index out of range");
            out.points.push_back(dataset.points[static_cast<std::size_t>(i)]);
            out.labels.push_back(dataset.labels[static_cast<std::size_t>(i)]);
        }
    }
    return machines;
}

std::vector<BinaryDataset> partition(const BinaryDataset& dataset,
                                     const std::vector<ClusterResult>& cluster_results,
                                     const Arrangement& arrangement) {
    auto machines = gather(dataset, partition_indices(dataset, cluster_results, arrangement));
    for (auto& m : machines) m.validate(); // every machine holds every class
    return machines;
}

} // namespace ptm
