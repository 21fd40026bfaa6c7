#include "ptm/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ptm/errors.hpp"
#include "ptm/rand.hpp"

namespace ptm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

const BinaryDataset* baseline_stop_set(EarlyStopMode mode, const BinaryDataset& train,
                                       const BinaryDataset& test) {
    switch (mode) {
        case EarlyStopMode::Train: return &train;
        case EarlyStopMode::Test: return &test;
        case EarlyStopMode::Off: return nullptr;
    }
    throw ContractError("benchmark: unknown early-stop mode");
}

RunRow run_baseline(const BinaryDataset& train, const BinaryDataset& test,
                    const BenchmarkConfig& cfg, std::uint64_t cell_seed, int repeat) {
    RunRow row;
    row.k = 0;
    row.repeat = repeat;

    TmParams p = cfg.ensemble.machine;
    p.clauses_per_class = cfg.ensemble.total_clauses_per_class;
    p.seed = derive_seed(cell_seed, SeedDomain::Machine, 0);
    TsetlinMachine machine(train.num_classes, train.width, p);

    const TrainStats ts =
        machine.train(train, p.epochs, baseline_stop_set(cfg.early_stop, train, test));
    const EvalStats es = evaluate_machine(machine, test);

    row.accuracy = es.accuracy;
    row.train_seconds = ts.train_seconds;
    row.infer_seconds = es.wall_seconds;
    row.clause_updates = ts.clause_updates;
    row.clause_evaluations = es.clause_evaluations;
    row.epochs_run = ts.epochs_run;
    row.early_stopped = ts.early_stopped;
    row.peak_resident_machines = 1;
    return row;
}

void check_invariants(const PresortedEnsemble& ens, const BinaryDataset& train, int repeat,
                      BenchmarkReport& report) {
    const std::string where =
        "repeat " + std::to_string(repeat) + ", k=" + std::to_string(ens.k()) + ": ";
    auto fail = [&](const std::string& msg) {
        report.invariants_ok = false;
        report.invariant_failures.push_back(where + msg);
    };

    // The K member lists must be an exact set-partition of the train split.
    std::vector<int> all;
    all.reserve(static_cast<std::size_t>(train.size()));
    for (const auto& m : ens.members()) all.insert(all.end(), m.begin(), m.end());
    std::sort(all.begin(), all.end());
    bool exact = static_cast<int>(all.size()) == train.size();
    for (std::size_t i = 0; exact && i < all.size(); ++i)
        exact = all[i] == static_cast<int>(i);
    if (!exact)
        fail("partitions are not an exact set-partition of the train split");

    for (std::size_t m = 0; m < ens.members().size(); ++m)
        if (ens.members()[m].size() != static_cast<std::size_t>(ens.partitions()[m].size()))
            fail("partition " + std::to_string(m) + " size disagrees with its member list");

    // Budgets: one per machine, even, positive, summing exactly to the total.
    const auto& budgets = ens.budgets();
    if (static_cast<int>(budgets.size()) != ens.k())
        fail("expected one clause budget per machine");
    long long total = 0;
    for (std::size_t m = 0; m < budgets.size(); ++m) {
        if (budgets[m] < 2 || budgets[m] % 2 != 0)
            fail("budget " + std::to_string(m) + " is not an even count >= 2");
        total += budgets[m];
    }
    if (total != ens.config().total_clauses_per_class)
        fail("budgets sum to " + std::to_string(total) + ", expected " +
             std::to_string(ens.config().total_clauses_per_class));
}

RunRow run_cell(const BinaryDataset& train, const BinaryDataset& test,
                const BenchmarkConfig& cfg, std::uint64_t cell_seed, int repeat, int k,
                BenchmarkReport& report) {
    RunRow row;
    row.k = k;
    row.repeat = repeat;

    EnsembleConfig ec = cfg.ensemble;
    ec.k = k;
    ec.seed = cell_seed;

    const auto build_start = Clock::now();
    PresortedEnsemble ens = PresortedEnsemble::build(train, ec);
    row.presort_seconds = seconds_since(build_start);

    check_invariants(ens, train, repeat, report);

    TrainOptions to;
    to.sequential = cfg.sequential;
    to.workers = cfg.workers > 0 ? cfg.workers : k;
    switch (cfg.early_stop) {
        case EarlyStopMode::Train: break; // defaults: stop on own partition
        case EarlyStopMode::Test:
            to.paper_mode = true;
            to.test_data = &test;
            break;
        case EarlyStopMode::Off: to.early_stop = false; break;
    }

    const UpdateStats us = ens.train(to);
    const EvalStats es = ens.evaluate(test);

    row.accuracy = es.accuracy;
    row.train_seconds = us.wall_seconds;
    row.infer_seconds = es.wall_seconds;
    row.clause_updates = us.clause_updates;
    row.clause_evaluations = es.clause_evaluations;
    row.epochs_run = us.epochs_run;
    row.early_stopped = us.early_stopped;
    row.peak_resident_machines = us.peak_resident_machines;
    return row;
}

void emit_progress(std::ostream* progress, const RunRow& row) {
    if (progress == nullptr) return;
    *progress << "repeat " << row.repeat << " "
              << (row.k == 0 ? std::string("baseline") : "k=" + std::to_string(row.k));
    if (row.failed) {
        *progress << " FAILED: " << row.error << "\n";
    } else {
        *progress << " accuracy=" << row.accuracy << " train_s=" << row.train_seconds
                  << " infer_s=" << row.infer_seconds << " updates=" << row.clause_updates
                  << (row.early_stopped ? " (early stop)" : "") << "\n";
    }
    progress->flush();
}

nlohmann::json ga_json(const GaConfig& ga) {
    return {{"population_size", ga.population_size},
            {"generations", ga.generations},
            {"mutation_rate", ga.mutation_rate},
            {"tournament_size", ga.tournament_size},
            {"elite_count", ga.elite_count}};
}

nlohmann::json row_json(const RunRow& r) {
    return {{"k", r.k},
            {"repeat", r.repeat},
            {"failed", r.failed},
            {"error", r.error},
            {"accuracy", r.accuracy},
            {"presort_seconds", r.presort_seconds},
            {"train_seconds", r.train_seconds},
            {"infer_seconds", r.infer_seconds},
            {"clause_updates", r.clause_updates},
            {"clause_evaluations", r.clause_evaluations},
            {"epochs_run", r.epochs_run},
            {"early_stopped", r.early_stopped},
            {"peak_resident_machines", r.peak_resident_machines}};
}

nlohmann::json mean_json(const MeanRow& m) {
    return {{"k", m.k},
            {"runs", m.runs},
            {"accuracy", m.accuracy},
            {"presort_seconds", m.presort_seconds},
            {"train_seconds", m.train_seconds},
            {"infer_seconds", m.infer_seconds},
            {"clause_updates", m.clause_updates},
            {"clause_evaluations", m.clause_evaluations},
            {"epochs_run", m.epochs_run}};
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("error while writing " + path.string());
}

} // namespace

std::string to_string(EarlyStopMode mode) {
    switch (mode) {
        case EarlyStopMode::Train: return "train";
        case EarlyStopMode::Test: return "test";
        case EarlyStopMode::Off: return "off";
    }
    throw ContractError("early-stop mode: unknown enum value");
}

EarlyStopMode early_stop_from_string(const std::string& name) {
    if (name == "train") return EarlyStopMode::Train;
    if (name == "test") return EarlyStopMode::Test;
    if (name == "off") return EarlyStopMode::Off;
    throw ConfigError("unknown early-stop mode '" + name + "' (expected train, test or off)");
}

void BenchmarkConfig::validate() const {
    if (dataset_name.empty()) throw ConfigError("benchmark: dataset_name must not be empty");
    if (ks.empty()) throw ConfigError("benchmark: the K sweep must not be empty");
    std::set<int> seen;
    for (int k : ks) {
        if (k < 1) throw ConfigError("benchmark: every swept K must be >= 1");
        if (!seen.insert(k).second)
            throw ConfigError("benchmark: duplicate K " + std::to_string(k) + " in sweep");
    }
    if (repeats < 1) throw ConfigError("benchmark: repeats must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("benchmark: train_fraction must be in (0, 1)");
    if (workers < 0) throw ConfigError("benchmark: workers must be >= 0 (0 means K)");
    EnsembleConfig probe = ensemble;
    probe.k = *seen.begin();
    probe.validate();
}

BenchmarkReport run_benchmark(const BinaryDataset& pool, const BenchmarkConfig& cfg,
                              std::ostream* progress) {
    cfg.validate();
    pool.validate();
    if (pool.num_classes < 2)
        throw ConfigError("benchmark: the dataset needs at least 2 classes");

    BenchmarkReport report;
    report.config = cfg;
    report.pool_size = pool.size();
    report.num_classes = pool.num_classes;
    report.width = pool.width;

    const std::uint64_t master = cfg.ensemble.seed;
    for (int r = 0; r < cfg.repeats; ++r) {
        const auto [train, test] =
            split(pool, cfg.train_fraction, derive_seed(master, SeedDomain::Split,
                                                        static_cast<std::uint64_t>(r)));
        // One machine-seed stream per repeat, shared by the baseline and
        // every swept K: the baseline is then bit-identical to the K=1
        // ensemble member, and repeats stay independent.
        const std::uint64_t cell_seed =
            derive_seed(master, SeedDomain::Run, static_cast<std::uint64_t>(r));

        auto guarded = [&](int k, auto&& fn) {
            RunRow row;
            try {
                row = fn();
            } catch (const std::exception& e) {
                row = RunRow{};
                row.k = k;
                row.repeat = r;
                row.failed = true;
                row.error = e.what();
                report.all_cells_ok = false;
            }
            emit_progress(progress, row);
            report.rows.push_back(std::move(row));
        };

        guarded(0, [&] { return run_baseline(train, test, cfg, cell_seed, r); });
        for (int k : cfg.ks)
            guarded(k, [&] { return run_cell(train, test, cfg, cell_seed, r, k, report); });
    }

    std::vector<int> mean_ks = cfg.ks;
    std::sort(mean_ks.begin(), mean_ks.end());
    mean_ks.insert(mean_ks.begin(), 0);
    for (int k : mean_ks) {
        MeanRow m;
        m.k = k;
        for (const RunRow& row : report.rows) {
            if (row.k != k || row.failed) continue;
            ++m.runs;
            m.accuracy += row.accuracy;
            m.presort_seconds += row.presort_seconds;
            m.train_seconds += row.train_seconds;
            m.infer_seconds += row.infer_seconds;
            m.clause_updates += static_cast<double>(row.clause_updates);
            m.clause_evaluations += static_cast<double>(row.clause_evaluations);
            m.epochs_run += row.epochs_run;
        }
        if (m.runs > 0) {
            m.accuracy /= m.runs;
            m.presort_seconds /= m.runs;
            m.train_seconds /= m.runs;
            m.infer_seconds /= m.runs;
            m.clause_updates /= m.runs;
            m.clause_evaluations /= m.runs;
            m.epochs_run /= m.runs;
        }
        report.means.push_back(m);
    }
    return report;
}

void write_report_json(const BenchmarkReport& report, const std::filesystem::path& path) {
    const BenchmarkConfig& cfg = report.config;
    nlohmann::json j;
    j["schema"] = "ptm-benchmark-report-v1";
    j["config"] = {{"dataset", cfg.dataset_name},
                   {"binarize_threshold", cfg.binarize_threshold},
                   {"ks", cfg.ks},
                   {"repeats", cfg.repeats},
                   {"train_fraction", cfg.train_fraction},
                   {"early_stop", to_string(cfg.early_stop)},
                   {"sequential", cfg.sequential},
                   {"workers", cfg.workers},
                   {"seed", cfg.ensemble.seed},
                   {"routing", to_string(cfg.ensemble.routing)},
                   {"total_clauses_per_class", cfg.ensemble.total_clauses_per_class},
                   {"kmedoid_max_iterations", cfg.ensemble.kmedoid_max_iterations},
                   {"machine",
                    {{"threshold", cfg.ensemble.machine.threshold},
                     {"specificity", cfg.ensemble.machine.specificity},
                     {"states", cfg.ensemble.machine.states},
                     {"epochs", cfg.ensemble.machine.epochs}}},
                   {"dispersion_ga", ga_json(cfg.ensemble.dispersion_ga)},
                   {"alignment_ga", ga_json(cfg.ensemble.alignment_ga)}};
    j["pool"] = {{"size", report.pool_size},
                 {"classes", report.num_classes},
                 {"width", report.width}};
    j["rows"] = nlohmann::json::array();
    for (const RunRow& r : report.rows) j["rows"].push_back(row_json(r));
    j["means"] = nlohmann::json::array();
    for (const MeanRow& m : report.means) j["means"].push_back(mean_json(m));
    j["invariants_ok"] = report.invariants_ok;
    j["invariant_failures"] = report.invariant_failures;
    j["all_cells_ok"] = report.all_cells_ok;

    auto out = open_out(path);
    out << j.dump(2) << "\n";
    finish_out(out, path);
}

void write_report_csv(const BenchmarkReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "dataset,k,repeat,failed,error,accuracy,presort_seconds,train_seconds,"
           "infer_seconds,clause_updates,clause_evaluations,epochs_run,early_stopped,"
           "peak_resident_machines\n";
    for (const RunRow& r : report.rows) {
        out << csv_quote(report.config.dataset_name) << ',' << r.k << ',' << r.repeat << ','
            << (r.failed ? 1 : 0) << ',' << csv_quote(r.error) << ','
            << format_double(r.accuracy) << ',' << format_double(r.presort_seconds) << ','
            << format_double(r.train_seconds) << ',' << format_double(r.infer_seconds) << ','
            << r.clause_updates << ',' << r.clause_evaluations << ',' << r.epochs_run << ','
            << (r.early_stopped ? 1 : 0) << ',' << r.peak_resident_machines << '\n';
    }
    finish_out(out, path);
}

void write_plot_csv(const BenchmarkReport& report, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "dataset,k,accuracy,train_seconds,infer_seconds,clause_updates\n";
    for (const MeanRow& m : report.means) {
        out << csv_quote(report.config.dataset_name) << ',' << m.k << ','
            << format_double(m.accuracy) << ',' << format_double(m.train_seconds) << ','
            << format_double(m.infer_seconds) << ',' << format_double(m.clause_updates)
            << '\n';
    }
    finish_out(out, path);
}

} // namespace ptm
