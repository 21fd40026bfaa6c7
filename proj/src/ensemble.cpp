#include "ptm/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "ptm/errors.hpp"
#include "ptm/rand.hpp"
#include "ptm/serialize.hpp"

namespace ptm {

namespace {

std::filesystem::path machine_file(const std::filesystem::path& dir, int index) {
    return dir / ("machine_" + std::to_string(index) + ".ptm");
}

TmParams machine_params(const EnsembleConfig& cfg, int index, int budget) {
    TmParams p = cfg.machine;
    p.clauses_per_class = budget;
    p.seed = derive_seed(cfg.seed, SeedDomain::Machine, static_cast<std::uint64_t>(index));
    return p;
}

// Tracks how many machines exist at once across worker threads.
class ResidencyGauge {
public:
    void up() {
        const int now = current_.fetch_add(1) + 1;
        int seen = peak_.load();
        while (seen < now && !peak_.compare_exchange_weak(seen, now)) {
        }
    }
    void down() { current_.fetch_sub(1); }
    int peak() const { return peak_.load(); }

private:
    std::atomic<int> current_{0};
    std::atomic<int> peak_{0};
};

} // namespace

std::string to_string(RoutingMode mode) {
    return mode == RoutingMode::NearestMedoid ? "nearest-medoid" : "all-machines";
}

RoutingMode routing_from_string(const std::string& name) {
    if (name == "nearest-medoid") return RoutingMode::NearestMedoid;
    if (name == "all-machines") return RoutingMode::AllMachinesArgmax;
    throw ConfigError("unknown routing mode '" + name +
                      "' (expected nearest-medoid or all-machines)");
}

std::vector<int> apportion(int total_per_class, const std::vector<int>& machine_sizes) {
    const int k = static_cast<int>(machine_sizes.size());
    if (k < 1) throw ContractError("apportion: need at least one machine");
    if (total_per_class < 2 || total_per_class % 2 != 0)
        throw ContractError("apportion: total must be even and positive");
    if (total_per_class < 2 * k)
        throw ContractError("apportion: total " + std::to_string(total_per_class) +
                            " cannot give every one of " + std::to_string(k) +
                            " machines a clause pair");
    long long size_sum = 0;
    for (int s : machine_sizes) {
        if (s <= 0) throw ContractError("apportion: machine sizes must be positive");
        size_sum += s;
    }

    // Work in clause pairs so every budget stays even.
    const long long pairs_total = total_per_class / 2;
    std::vector<long long> pairs(static_cast<std::size_t>(k));
    std::vector<long long> remainder(static_cast<std::size_t>(k));
    long long assigned = 0;
    for (int i = 0; i < k; ++i) {
        const long long scaled = pairs_total * machine_sizes[static_cast<std::size_t>(i)];
        pairs[static_cast<std::size_t>(i)] = scaled / size_sum;
        remainder[static_cast<std::size_t>(i)] = scaled % size_sum;
        assigned += pairs[static_cast<std::size_t>(i)];
    }

    // Largest remainder takes the leftover pairs; ties to the lowest index.
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return remainder[static_cast<std::size_t>(a)] >
               remainder[static_cast<std::size_t>(b)];
    });
    const long long leftover = pairs_total - assigned; // < k
    for (long long j = 0; j < leftover; ++j)
        ++pairs[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];

    // No machine may end at zero: take a pair from the largest holder.
    for (;;) {
        int zero = -1;
        for (int i = 0; i < k && zero < 0; ++i)
            if (pairs[static_cast<std::size_t>(i)] == 0) zero = i;
        if (zero < 0) break;
        int donor = 0;
        for (int i = 1; i < k; ++i)
            if (pairs[static_cast<std::size_t>(i)] > pairs[static_cast<std::size_t>(donor)])
                donor = i;
        --pairs[static_cast<std::size_t>(donor)];
        ++pairs[static_cast<std::size_t>(zero)];
    }

    std::vector<int> result(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        result[static_cast<std::size_t>(i)] =
            static_cast<int>(2 * pairs[static_cast<std::size_t>(i)]);
    return result;
}

void EnsembleConfig::validate() const {
    if (k < 1) throw ConfigError("ensemble: k must be at least 1");
    if (total_clauses_per_class < 2 || total_clauses_per_class % 2 != 0)
        throw ConfigError("ensemble: total clauses per class must be even and positive");
    if (total_clauses_per_class < 2 * k)
        throw ConfigError("ensemble: total clauses per class " +
                          std::to_string(total_clauses_per_class) +
                          " is below one clause pair per machine (k = " +
                          std::to_string(k) + ")");
    TmParams probe = machine;
    probe.clauses_per_class = 2; // apportioned per machine; not validated here
    try {
        probe.validate();
    } catch (const ConfigError& e) {
        throw ConfigError("ensemble machine " + std::string(e.what()));
    }
    dispersion_ga.validate();
    alignment_ga.validate();
    if (kmedoid_max_iterations < 1)
        throw ConfigError("ensemble: kmedoid_max_iterations must be positive");
}

EvalStats evaluate_machine(const TsetlinMachine& machine, const BinaryDataset& test) {
    test.validate();
    EvalStats stats;
    const auto start = std::chrono::steady_clock::now();
    int correct = 0;
    for (int i = 0; i < test.size(); ++i)
        if (machine.predict(test.points[static_cast<std::size_t>(i)]) ==
            test.labels[static_cast<std::size_t>(i)])
            ++correct;
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    stats.clause_evaluations = static_cast<unsigned long long>(test.size()) *
                               static_cast<unsigned long long>(machine.params().clauses_per_class) *
                               static_cast<unsigned long long>(machine.num_classes());
    return stats;
}

PresortedEnsemble PresortedEnsemble::build(const BinaryDataset& train,
                                           const EnsembleConfig& cfg) {
    cfg.validate();
    train.validate();
    if (train.num_classes < 2)
        throw ContractError("ensemble: need at least two classes");

    PresortedEnsemble e;
    e.cfg_ = cfg;
    e.classes_ = train.num_classes;
    e.width_ = train.width;

    const auto by_class = train.indices_by_class();
    for (int c = 0; c < e.classes_; ++c)
        if (static_cast<int>(by_class[static_cast<std::size_t>(c)].size()) < cfg.k)
            throw ContractError(
                "ensemble: class " + std::to_string(c) + " has " +
                std::to_string(by_class[static_cast<std::size_t>(c)].size()) +
                " points, fewer than k = " + std::to_string(cfg.k));

    // Stages 1 + 2, independently per class: spread-out seeds, then K-medoid.
    std::vector<std::vector<BitVector>> medoids_per_class(
        static_cast<std::size_t>(e.classes_));
    std::vector<ClusterResult> cluster_results;
    cluster_results.reserve(static_cast<std::size_t>(e.classes_));
    for (int c = 0; c < e.classes_; ++c) {
        const auto& indices = by_class[static_cast<std::size_t>(c)];
        std::vector<BitVector> class_points;
        class_points.reserve(indices.size());
        for (int i : indices)
            class_points.push_back(train.points[static_cast<std::size_t>(i)]);

        GaConfig dga = cfg.dispersion_ga;
        dga.seed = derive_seed(cfg.seed, SeedDomain::Dispersion,
                               static_cast<std::uint64_t>(c));
        const SelectionChromosome seeds = max_dispersion(class_points, cfg.k, dga);
        ClusterResult res = cluster(class_points, seeds, cfg.kmedoid_max_iterations);
        auto& medoids = medoids_per_class[static_cast<std::size_t>(c)];
        medoids.reserve(res.medoid_indices.size());
        for (int m : res.medoid_indices)
            medoids.push_back(class_points[static_cast<std::size_t>(m)]);
        cluster_results.push_back(std::move(res));
    }

    // Stage 3: align clusters across classes into machine columns.
    GaConfig aga = cfg.alignment_ga;
    aga.seed = derive_seed(cfg.seed, SeedDomain::Alignment, 0);
    e.arrangement_ = align(medoids_per_class, aga);
    e.grid_ = make_grid(medoids_per_class, e.arrangement_);
    e.members_ = partition_indices(train, cluster_results, e.arrangement_);
    e.partitions_ = gather(train, e.members_);
    for (const auto& part : e.partitions_) part.validate(); // every machine holds every class

    std::vector<int> sizes;
    sizes.reserve(e.partitions_.size());
    for (const BinaryDataset& part : e.partitions_) sizes.push_back(part.size());
    e.budgets_ = apportion(cfg.total_clauses_per_class, sizes);

    e.machines_.resize(static_cast<std::size_t>(cfg.k)); // constructed by train()
    return e;
}

bool PresortedEnsemble::machines_resident() const {
    if (machines_.empty()) return false;
    for (const auto& m : machines_)
        if (!m.has_value()) return false;
    return true;
}

const TsetlinMachine& PresortedEnsemble::machine(int index) const {
    if (index < 0 || index >= static_cast<int>(machines_.size()))
        throw ContractError("ensemble: machine index out of range");
    const auto& m = machines_[static_cast<std::size_t>(index)];
    if (!m.has_value())
        throw ContractError("ensemble: machine " + std::to_string(index) +
                            " is not resident; train or load first");
    return *m;
}

int route(const MedoidGrid& grid, const BitVector& input) {
    grid.validate();
    if (input.width() != grid.medoids[0][0].width())
        throw ContractError("route: input width mismatch");
    int best_column = 0;
    int best_distance = -1;
    for (int k = 0; k < grid.columns(); ++k) {
        for (int c = 0; c < grid.classes(); ++c) {
            const int d = hamming_distance(
                grid.medoids[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)],
                input);
            // Strict improvement keeps the lowest column, then lowest row.
            if (best_distance < 0 || d < best_distance) {
                best_distance = d;
                best_column = k;
            }
        }
    }
    return best_column;
}

int PresortedEnsemble::route(const BitVector& input) const {
    if (input.width() != width_) throw ContractError("ensemble: input width mismatch");
    return ptm::route(grid_, input);
}

TrainStats PresortedEnsemble::train_one(int index, const TrainOptions& opts,
                                        const std::vector<BinaryDataset>& test_shares) {
    TsetlinMachine& m = *machines_[static_cast<std::size_t>(index)];
    const BinaryDataset& part = partitions_[static_cast<std::size_t>(index)];
    const BinaryDataset* stop = nullptr;
    if (opts.early_stop) {
        if (opts.paper_mode) {
            const BinaryDataset& share = test_shares[static_cast<std::size_t>(index)];
            if (share.size() > 0) stop = &share;
        } else {
            stop = &part;
        }
    }
    return m.train(part, cfg_.machine.epochs, stop);
}

UpdateStats PresortedEnsemble::train(const TrainOptions& opts) {
    if (partitions_.empty())
        throw ContractError("ensemble: no training partitions (loaded from disk?)");
    for (std::size_t i = 0; i < partitions_.size(); ++i)
        if (partitions_[i].size() == 0)
            throw ContractError("ensemble: partition " + std::to_string(i) + " is empty");
    if (opts.workers < 1) throw ContractError("ensemble: workers must be positive");
    if (opts.paper_mode) {
        if (!opts.early_stop)
            throw ContractError("ensemble: paper_mode requires early_stop");
        if (opts.test_data == nullptr)
            throw ContractError("ensemble: paper_mode requires test data");
    }

    // Paper-mode stop metric: each machine watches its routed test share.
    std::vector<BinaryDataset> test_shares(static_cast<std::size_t>(cfg_.k));
    if (opts.paper_mode) {
        opts.test_data->validate();
        for (BinaryDataset& share : test_shares) {
            share.width = width_;
            share.num_classes = classes_;
        }
        for (int i = 0; i < opts.test_data->size(); ++i) {
            const BitVector& x = opts.test_data->points[static_cast<std::size_t>(i)];
            auto& share = test_shares[static_cast<std::size_t>(route(x))];
            share.points.push_back(x);
            share.labels.push_back(opts.test_data->labels[static_cast<std::size_t>(i)]);
        }
    }

    UpdateStats stats;
    stats.per_machine.resize(static_cast<std::size_t>(cfg_.k));
    ResidencyGauge gauge;
    const auto start = std::chrono::steady_clock::now();

    if (opts.sequential) {
        std::filesystem::path dir = opts.spill_dir;
        const bool managed = dir.empty();
        if (managed) {
            std::string tmpl =
                (std::filesystem::temp_directory_path() / "ptm_spill_XXXXXX").string();
            if (mkdtemp(tmpl.data()) == nullptr)
                throw IoError("cannot create spill directory");
            dir = tmpl;
        } else {
            std::filesystem::create_directories(dir);
        }
        for (int i = 0; i < cfg_.k; ++i) {
            auto& slot = machines_[static_cast<std::size_t>(i)];
            slot.emplace(classes_, width_,
                         machine_params(cfg_, i, budgets_[static_cast<std::size_t>(i)]));
            gauge.up();
            stats.per_machine[static_cast<std::size_t>(i)] =
                train_one(i, opts, test_shares);
            save_machine(*slot, machine_file(dir, i));
            slot.reset(); // release before the next machine exists
            gauge.down();
        }
        // Momentary mastery is over; bring the models back for inference.
        for (int i = 0; i < cfg_.k; ++i)
            machines_[static_cast<std::size_t>(i)] = load_machine(machine_file(dir, i));
        if (managed) std::filesystem::remove_all(dir);
    } else {
        for (int i = 0; i < cfg_.k; ++i) {
            machines_[static_cast<std::size_t>(i)].emplace(
                classes_, width_,
                machine_params(cfg_, i, budgets_[static_cast<std::size_t>(i)]));
            gauge.up();
        }
        const int workers = std::min(opts.workers, cfg_.k);
        if (workers == 1) {
            for (int i = 0; i < cfg_.k; ++i)
                stats.per_machine[static_cast<std::size_t>(i)] =
                    train_one(i, opts, test_shares);
        } else {
            std::atomic<int> next{0};
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg_.k));
            auto worker = [&] {
                for (;;) {
                    const int i = next.fetch_add(1);
                    if (i >= cfg_.k) return;
                    try {
                        stats.per_machine[static_cast<std::size_t>(i)] =
                            train_one(i, opts, test_shares);
                    } catch (...) {
                        errors[static_cast<std::size_t>(i)] = std::current_exception();
                    }
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
            for (const auto& err : errors)
                if (err) std::rethrow_exception(err);
        }
    }

    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stats.peak_resident_machines = gauge.peak();
    stats.early_stopped = true;
    for (const TrainStats& m : stats.per_machine) {
        stats.clause_updates += m.clause_updates;
        stats.epochs_run = std::max(stats.epochs_run, m.epochs_run);
        stats.early_stopped = stats.early_stopped && m.early_stopped;
    }
    return stats;
}

int PresortedEnsemble::classify(const BitVector& input) const {
    if (!machines_resident())
        throw ContractError("ensemble: machines are not resident; train or load first");
    if (cfg_.routing == RoutingMode::NearestMedoid)
        return machines_[static_cast<std::size_t>(route(input))]->predict(input);

    // Diagnostic mode: the single largest class sum anywhere wins; ties keep
    // the lowest class, then the lowest machine.
    int best_class = 0;
    bool first = true;
    int best_sum = 0;
    for (int c = 0; c < classes_; ++c) {
        for (int k = 0; k < cfg_.k; ++k) {
            const int s = machines_[static_cast<std::size_t>(k)]->class_sum(c, input);
            if (first || s > best_sum) {
                first = false;
                best_sum = s;
                best_class = c;
            }
        }
    }
    return best_class;
}

EvalStats PresortedEnsemble::evaluate(const BinaryDataset& test) const {
    test.validate();
    if (!machines_resident())
        throw ContractError("ensemble: machines are not resident; train or load first");
    if (test.num_classes > classes_)
        throw ContractError("ensemble: test set has more classes than the ensemble");
    if (test.width != width_) throw ContractError("ensemble: test width mismatch");

    unsigned long long total_budget = 0;
    for (int b : budgets_) total_budget += static_cast<unsigned long long>(b);

    EvalStats stats;
    const auto start = std::chrono::steady_clock::now();
    int correct = 0;
    for (int i = 0; i < test.size(); ++i) {
        const BitVector& x = test.points[static_cast<std::size_t>(i)];
        int predicted;
        if (cfg_.routing == RoutingMode::NearestMedoid) {
            const int column = route(x);
            predicted = machines_[static_cast<std::size_t>(column)]->predict(x);
            stats.clause_evaluations +=
                static_cast<unsigned long long>(budgets_[static_cast<std::size_t>(column)]) *
                static_cast<unsigned long long>(classes_);
        } else {
            predicted = classify(x);
            stats.clause_evaluations +=
                total_budget * static_cast<unsigned long long>(classes_);
        }
        if (predicted == test.labels[static_cast<std::size_t>(i)]) ++correct;
    }
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    return stats;
}

void PresortedEnsemble::save(const std::filesystem::path& dir) const {
    if (!machines_resident())
        throw ContractError("ensemble: machines are not resident; nothing to save");
    std::filesystem::create_directories(dir);

    nlohmann::json manifest;
    manifest["format"] = "presorted-ensemble";
    manifest["version"] = 1;
    manifest["classes"] = classes_;
    manifest["width"] = width_;
    manifest["k"] = cfg_.k;
    manifest["routing"] = to_string(cfg_.routing);
    manifest["seed"] = cfg_.seed;
    manifest["total_clauses_per_class"] = cfg_.total_clauses_per_class;
    manifest["budgets"] = budgets_;
    manifest["machine_params"] = {{"threshold", cfg_.machine.threshold},
                                  {"specificity", cfg_.machine.specificity},
                                  {"states", cfg_.machine.states},
                                  {"epochs", cfg_.machine.epochs}};
    manifest["arrangement"] = arrangement_.rows;

    nlohmann::json grid = nlohmann::json::array();
    for (int c = 0; c < classes_; ++c) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < cfg_.k; ++k)
            row.push_back(
                grid_.medoids[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)]
                    .to_string());
        grid.push_back(std::move(row));
    }
    manifest["grid_medoids"] = std::move(grid);
    manifest["grid_cluster_of"] = grid_.cluster_of;

    nlohmann::json files = nlohmann::json::array();
    for (int i = 0; i < cfg_.k; ++i) {
        const auto path = machine_file(dir, i);
        save_machine(*machines_[static_cast<std::size_t>(i)], path);
        files.push_back({{"file", path.filename().string()},
                         {"digest", fnv1a64_hex(path)}});
    }
    manifest["machines"] = std::move(files);

    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing " + (dir / "manifest.json").string());
}

PresortedEnsemble PresortedEnsemble::load(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open " + manifest_path.string());

    nlohmann::json manifest;
    try {
        in >> manifest;

        if (manifest.at("format").get<std::string>() != "presorted-ensemble")
            throw ParseError(manifest_path.string() + ": not an ensemble manifest");
        if (manifest.at("version").get<int>() != 1)
            throw ParseError(manifest_path.string() + ": unsupported manifest version");

        PresortedEnsemble e;
        e.classes_ = manifest.at("classes").get<int>();
        e.width_ = manifest.at("width").get<int>();
        e.cfg_.k = manifest.at("k").get<int>();
        e.cfg_.routing = routing_from_string(manifest.at("routing").get<std::string>());
        e.cfg_.seed = manifest.at("seed").get<std::uint64_t>();
        e.cfg_.total_clauses_per_class =
            manifest.at("total_clauses_per_class").get<int>();
        e.budgets_ = manifest.at("budgets").get<std::vector<int>>();
        const auto& mp = manifest.at("machine_params");
        e.cfg_.machine.threshold = mp.at("threshold").get<int>();
        e.cfg_.machine.specificity = mp.at("specificity").get<double>();
        e.cfg_.machine.states = mp.at("states").get<int>();
        e.cfg_.machine.epochs = mp.at("epochs").get<int>();
        e.arrangement_.rows =
            manifest.at("arrangement").get<std::vector<std::vector<int>>>();
        e.arrangement_.validate();

        const auto& grid = manifest.at("grid_medoids");
        e.grid_.medoids.resize(static_cast<std::size_t>(e.classes_));
        for (int c = 0; c < e.classes_; ++c) {
            const auto& row = grid.at(static_cast<std::size_t>(c));
            for (const auto& bits : row)
                e.grid_.medoids[static_cast<std::size_t>(c)].push_back(
                    BitVector::from_string(bits.get<std::string>()));
        }
        e.grid_.cluster_of =
            manifest.at("grid_cluster_of").get<std::vector<std::vector<int>>>();
        e.grid_.validate();

        const auto& files = manifest.at("machines");
        if (static_cast<int>(files.size()) != e.cfg_.k)
            throw ParseError(manifest_path.string() + ": machine file count mismatch");
        e.machines_.resize(static_cast<std::size_t>(e.cfg_.k));
        for (int i = 0; i < e.cfg_.k; ++i) {
            const auto& entry = files.at(static_cast<std::size_t>(i));
            const auto path = dir / entry.at("file").get<std::string>();
            const std::string recorded = entry.at("digest").get<std::string>();
            if (fnv1a64_hex(path) != recorded)
                throw ParseError(path.string() + ": model digest mismatch");
            e.machines_[static_cast<std::size_t>(i)] = load_machine(path);
            const TsetlinMachine& m = *e.machines_[static_cast<std::size_t>(i)];
            if (m.num_classes() != e.classes_ || m.width() != e.width_ ||
                m.params().clauses_per_class != e.budgets_[static_cast<std::size_t>(i)])
                throw ParseError(path.string() + ": model does not match the manifest");
        }
        return e;
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(manifest_path.string() + ": " + err.what());
    }
}

} // namespace ptm
