#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ptm/dataset.hpp"
#include "ptm/ensemble.hpp"

namespace ptm {

/// What the per-epoch early-stop check looks at: each machine's own training
/// partition (Train, the default), its routed share of the test set (Test —
/// matches the original experimental protocol but lets the stop decision see
/// test data, so reports flag it), or nothing (Off: always the full epoch
/// budget).
enum class EarlyStopMode { Train, Test, Off };

std::string to_string(EarlyStopMode mode);
EarlyStopMode early_stop_from_string(const std::string& name); // ConfigError on unknown

/// One benchmark = `repeats` repetitions of: draw a fresh stratified
/// train/test split of the pool, train and evaluate a single-machine
/// baseline, then a pre-sorted ensemble for every K in `ks`. Within one
/// repeat the baseline and all ensembles share one derived seed, so the
/// baseline is exactly the K=1 ensemble member stream; across repeats both
/// the split and the machine seeds change.
struct BenchmarkConfig {
    std::string dataset_name = "dataset"; // echoed into reports and plots
    int binarize_threshold = 0;           // echo-only: how the pool was binarized
    std::vector<int> ks = {2};            // ensemble sizes to sweep
    int repeats = 1;
    double train_fraction = 0.8;
    EnsembleConfig ensemble; // .k and .seed are overridden per cell;
                             // .seed doubles as the master benchmark seed
    EarlyStopMode early_stop = EarlyStopMode::Train;
    bool sequential = false; // train ensemble members one at a time
    int workers = 0;         // parallel training threads; 0 -> K

    void validate() const; // ConfigError
};

/// One (repeat, K) cell. k == 0 is the single-machine baseline. A failed
/// cell keeps its slot with `failed` set and the error message recorded;
/// its metrics are meaningless and it is excluded from means.
struct RunRow {
    int k = 0;
    int repeat = 0;
    bool failed = false;
    std::string error;

    double accuracy = 0.0;
    double presort_seconds = 0.0; // ensemble build (stages 1-3); 0 for baseline
    double train_seconds = 0.0;   // training loop wall time
    double infer_seconds = 0.0;   // test-set evaluation wall time
    unsigned long long clause_updates = 0;
    unsigned long long clause_evaluations = 0;
    int epochs_run = 0;
    bool early_stopped = false;
    int peak_resident_machines = 0;
};

/// Arithmetic mean over the successful rows of one K (`runs` of them).
struct MeanRow {
    int k = 0;
    int runs = 0;
    double accuracy = 0.0;
    double presort_seconds = 0.0;
    double train_seconds = 0.0;
    double infer_seconds = 0.0;
    double clause_updates = 0.0;
    double clause_evaluations = 0.0;
    double epochs_run = 0.0;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    int pool_size = 0;
    int num_classes = 0;
    int width = 0;
    std::vector<RunRow> rows;
    std::vector<MeanRow> means; // k ascending, baseline (k=0) first
    /// Structural checks run on every ensemble cell: the K partitions are an
    /// exact set-partition of the train split, and clause budgets are even,
    /// positive and sum exactly to the configured total.
    bool invariants_ok = true;
    std::vector<std::string> invariant_failures;
    bool all_cells_ok = true; // no row has failed == true

    bool ok() const { return invariants_ok && all_cells_ok; }
};

/// Runs the full grid. Never throws for a cell failure (recorded in the
/// report instead); throws ConfigError/ContractError only for unusable
/// inputs. `progress`, when given, receives one line per finished cell.
BenchmarkReport run_benchmark(const BinaryDataset& pool, const BenchmarkConfig& cfg,
                              std::ostream* progress = nullptr);

/// report.json: full effective config (every defaulted parameter spelled
/// out) plus all rows, means and invariant results. The layout is pinned by
/// docs/benchmark_report.schema.json.
void write_report_json(const BenchmarkReport& report, const std::filesystem::path& path);

/// report.csv: one line per run row (failed cells included, error quoted).
void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path);

/// plot_data.csv: one line per mean row with the plotting columns
/// dataset,k,accuracy,train_seconds,infer_seconds,clause_updates
/// (k == 0 is the baseline row).
void write_plot_csv(const BenchmarkReport& report, const std::filesystem::path& path);

} // namespace ptm
