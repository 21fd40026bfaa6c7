#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ptm/alignment.hpp"
#include "ptm/dataset.hpp"
#include "ptm/dispersion.hpp"
#include "ptm/ga.hpp"
#include "ptm/kmedoid.hpp"
#include "ptm/tsetlin.hpp"

namespace ptm {

/// How a test input picks its machine(s). NearestMedoid routes to the single
/// column whose medoid (any class row) is closest in Hamming distance — the
/// cost-saving mode. AllMachinesArgmax is a diagnostic fallback that asks
/// every machine and takes the globally largest class sum.
enum class RoutingMode { NearestMedoid, AllMachinesArgmax };

std::string to_string(RoutingMode mode);
RoutingMode routing_from_string(const std::string& name); // ConfigError on unknown

/// Proportional clause budgets. Distributes total_per_class among machines
/// proportionally to machine_sizes, in clause *pairs* so every budget stays
/// even, by largest remainder (remainder ties go to the lowest machine
/// index). Every machine receives at least one pair; when proportional
/// rounding would strand a machine at zero, a pair moves over from the
/// largest holder (lowest index among equals). Results sum to total exactly.
std::vector<int> apportion(int total_per_class, const std::vector<int>& machine_sizes);

/// Everything needed to build one pre-sorted ensemble. The embedded machine
/// parameters are shared by all machines except clauses_per_class and seed,
/// which are apportioned/derived per machine.
struct EnsembleConfig {
    int k = 2;                        // number of machines (columns)
    int total_clauses_per_class = 400;
    TmParams machine;                 // clauses_per_class and seed are overridden
    GaConfig dispersion_ga;           // stage 1; seed derived per class
    GaConfig alignment_ga;            // stage 3; seed derived once
    int kmedoid_max_iterations = 100; // stage 2 cap
    RoutingMode routing = RoutingMode::NearestMedoid;
    std::uint64_t seed = 0;           // master seed for every derived stream

    void validate() const; // ConfigError
};

struct TrainOptions {
    /// Sequential mode trains one machine at a time: construct, train,
    /// serialize to spill_dir, release, move on — at most one machine is
    /// resident while training runs. The saved models are reloaded after the
    /// loop so the ensemble remains usable for inference.
    bool sequential = false;
    std::filesystem::path spill_dir; // sequential only; empty -> managed temp dir

    int workers = 1; // parallel mode: machines trained concurrently

    bool early_stop = true;
    /// Default stop metric is each machine's own training partition. With
    /// paper_mode, test_data is routed once and each machine stops on its
    /// routed share instead (reports must flag this: the stop decision then
    /// looks at test data).
    bool paper_mode = false;
    const BinaryDataset* test_data = nullptr;
};

/// Aggregated training counters. clause_updates sums the machines' counters;
/// epochs_run is the slowest machine; early_stopped means *every* machine hit
/// 100% on its stop metric before its epoch budget.
struct UpdateStats {
    unsigned long long clause_updates = 0;
    int epochs_run = 0;
    bool early_stopped = false;
    double wall_seconds = 0.0;
    int peak_resident_machines = 0; // during the training loop
    std::vector<TrainStats> per_machine;
};

/// Inference-side counters. clause_evaluations counts clause evaluations
/// only (the C*K medoid distances of routing are not clauses): per point,
/// NearestMedoid touches the routed machine's clauses_per_class x C clauses,
/// AllMachinesArgmax touches every machine's.
struct EvalStats {
    double accuracy = 0.0;
    double wall_seconds = 0.0;
    unsigned long long clause_evaluations = 0;
};

/// Baseline counterpart of PresortedEnsemble::evaluate so single-machine and
/// ensemble rows in a report share one metric definition.
EvalStats evaluate_machine(const TsetlinMachine& machine, const BinaryDataset& test);

/// Nearest-medoid routing: the column of the grid medoid (any class row)
/// closest to the input in Hamming distance. Distance ties go to the lowest
/// column, then the lowest class row.
int route(const MedoidGrid& grid, const BitVector& input);

/// K independent multi-class machines over a pre-sorted partition of the
/// training data. build() runs the three stages per class — maximum
/// dispersion seeds, K-medoid clustering, cross-class alignment — then
/// partitions the data and apportions clause budgets; machines themselves
/// are constructed by train() (sequential mode needs that deferral to keep
/// only one resident).
class PresortedEnsemble {
public:
    static PresortedEnsemble build(const BinaryDataset& train, const EnsembleConfig& cfg);

    int k() const { return cfg_.k; }
    int num_classes() const { return classes_; }
    int width() const { return width_; }
    const EnsembleConfig& config() const { return cfg_; }
    const Arrangement& arrangement() const { return arrangement_; }
    const MedoidGrid& grid() const { return grid_; }
    const std::vector<BinaryDataset>& partitions() const { return partitions_; }
    /// Original training-set indices backing each partition (exact
    /// set-partition of [0, train.size()); ascending within each machine).
    const std::vector<std::vector<int>>& members() const { return members_; }
    const std::vector<int>& budgets() const { return budgets_; }

    bool machines_resident() const;
    const TsetlinMachine& machine(int index) const; // ContractError if absent

    /// Nearest-medoid column for this input (see the free route()).
    int route(const BitVector& input) const;

    UpdateStats train(const TrainOptions& opts = {});

    /// Class prediction. AllMachinesArgmax breaks sum ties toward the lowest
    /// class, then the lowest machine.
    int classify(const BitVector& input) const;

    EvalStats evaluate(const BinaryDataset& test) const;

    /// Directory layout: manifest.json + machine_<k>.ptm model files with
    /// recorded digests. A loaded ensemble carries no training partitions,
    /// so it can classify/evaluate but not train.
    void save(const std::filesystem::path& dir) const;
    static PresortedEnsemble load(const std::filesystem::path& dir);

private:
    PresortedEnsemble() = default;

    TrainStats train_one(int index, const TrainOptions& opts,
                         const std::vector<BinaryDataset>& test_shares);

    EnsembleConfig cfg_;
    int classes_ = 0;
    int width_ = 0;
    Arrangement arrangement_;
    MedoidGrid grid_;
    std::vector<BinaryDataset> partitions_; // empty on a loaded ensemble
    std::vector<std::vector<int>> members_; // empty on a loaded ensemble
    std::vector<int> budgets_;
    std::vector<std::optional<TsetlinMachine>> machines_;
};

} // namespace ptm
