#include "ptm/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ptm/benchmark.hpp"
#include "ptm/csv.hpp"
#include "ptm/dataset.hpp"
#include "ptm/ensemble.hpp"
#include "ptm/errors.hpp"
#include "ptm/idx.hpp"
#include "ptm/rand.hpp"
#include "ptm/serialize.hpp"
#include "ptm/synthdata.hpp"
#include "ptm/tsetlin.hpp"

namespace ptm {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Shared option groups

struct DataOpts {
    std::string dataset;
    std::string format = "auto"; // auto|idx|csv
    int threshold = 128;
    int limit = 0; // 0 = all samples
    std::string name;
};

void add_data_opts(CLI::App* cmd, DataOpts& d) {
    cmd->add_option("--dataset", d.dataset,
                    "IDX directory (train-images-idx3-ubyte + train-labels-idx1-ubyte) "
                    "or CSV file (header, then label,f0,f1,... rows)")
        ->required();
    cmd->add_option("--format", d.format,
                    "Input layout; auto = directory -> idx, file -> csv")
        ->check(CLI::IsMember({"auto", "idx", "csv"}));
    cmd->add_option("--threshold", d.threshold,
                    "Binarization threshold: bit i = (feature i >= threshold)");
    cmd->add_option("--limit", d.limit, "Keep only the first N samples (0 = all)");
    cmd->add_option("--name", d.name, "Dataset name used in reports (default: path stem)");
}

struct MachineOpts {
    int clauses = 200; // total clauses per class, split across ensemble members
    int T = 25;
    double s = 10.0;
    int states = 256;
    int epochs = 30;
};

void add_machine_opts(CLI::App* cmd, MachineOpts& m) {
    cmd->add_option("--clauses", m.clauses,
                    "Total clauses per class (an ensemble splits them across machines)");
    cmd->add_option("--T", m.T, "Vote clamp threshold T (>= 1)");
    cmd->add_option("--s", m.s, "Specificity s (> 1)");
    cmd->add_option("--states", m.states, "Automaton states per literal (even, in [2, 32766])");
    cmd->add_option("--epochs", m.epochs, "Training epoch budget (>= 1)");
}

void add_out_opt(CLI::App* cmd, std::string& out) {
    cmd->add_option("--out", out, "Output directory (falls back to $PTM_OUT, then ./ptm_out)")
        ->envname("PTM_OUT");
}

// ---------------------------------------------------------------------------
// Helpers

fs::path ensure_out_dir(std::string out) {
    if (out.empty()) out = "ptm_out";
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::string infer_name(const DataOpts& d) {
    if (!d.name.empty()) return d.name;
    fs::path p = fs::path(d.dataset).lexically_normal();
    std::string stem = p.stem().string();
    if (stem.empty() || stem == ".") stem = p.parent_path().stem().string();
    return stem.empty() ? std::string("dataset") : stem;
}

RawDataset load_raw(const DataOpts& d) {
    std::string format = d.format;
    if (format == "auto") format = fs::is_directory(d.dataset) ? "idx" : "csv";

    RawDataset raw;
    if (format == "idx") {
        if (!fs::is_directory(d.dataset))
            throw IoError("idx dataset must be a directory, got " + d.dataset);
        const fs::path dir(d.dataset);
        raw = load_idx((dir / "train-images-idx3-ubyte").string(),
                       (dir / "train-labels-idx1-ubyte").string());
    } else {
        raw = load_csv(d.dataset);
    }
    if (d.limit < 0) throw ConfigError("--limit must be >= 0");
    if (d.limit > 0 && d.limit < raw.size()) {
        raw.samples.resize(static_cast<std::size_t>(d.limit));
        raw.labels.resize(static_cast<std::size_t>(d.limit));
    }
    raw.validate();
    return raw;
}

BinaryDataset load_binary(const DataOpts& d) { return binarize(load_raw(d), d.threshold); }

RoutingMode routing_flag(const std::string& v) {
    if (v == "nearest") return RoutingMode::NearestMedoid;
    if (v == "argmax") return RoutingMode::AllMachinesArgmax;
    return routing_from_string(v); // long names also accepted
}

EnsembleConfig make_ensemble_config(const MachineOpts& m, int k, const std::string& routing,
                                    std::uint64_t seed) {
    EnsembleConfig ec;
    ec.k = k;
    ec.total_clauses_per_class = m.clauses;
    ec.machine.threshold = m.T;
    ec.machine.specificity = m.s;
    ec.machine.states = m.states;
    ec.machine.epochs = m.epochs;
    ec.routing = routing_flag(routing);
    ec.seed = seed;
    return ec;
}

nlohmann::json machine_params_json(const TmParams& p) {
    return {{"threshold", p.threshold},
            {"specificity", p.specificity},
            {"states", p.states},
            {"epochs", p.epochs}};
}

nlohmann::json data_opts_json(const DataOpts& d, const std::string& name) {
    return {{"dataset", d.dataset},
            {"name", name},
            {"format", d.format},
            {"threshold", d.threshold},
            {"limit", d.limit}};
}

void write_json_file(const nlohmann::json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    out.flush();
    if (!out) throw IoError("error while writing " + path.string());
}

// ---------------------------------------------------------------------------
// gen: deterministic synthetic corpus in IDX layout

struct GenOpts {
    std::string out;
    int per_class = 250;
    int modes = 4;
    int noise = 128;
    std::uint64_t seed = 7;
};

int cmd_gen(const GenOpts& g, std::ostream& out) {
    const RawDataset data = synthetic_images(g.per_class, g.seed, g.modes, g.noise);
    const fs::path dir = ensure_out_dir(g.out);
    write_idx((dir / "train-images-idx3-ubyte").string(),
              (dir / "train-labels-idx1-ubyte").string(), data, kSyntheticRows,
              kSyntheticCols);
    out << "wrote " << dir.string() << ": " << data.size() << " samples, "
        << data.num_classes << " classes, " << kSyntheticRows << "x" << kSyntheticCols
        << " (seed " << g.seed << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// prep: run the pre-sorting stages and save their artifacts, no training

struct PrepOpts {
    DataOpts data;
    MachineOpts machine;
    int k = 2;
    std::string routing = "nearest";
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_prep(const PrepOpts& p, std::ostream& out) {
    const BinaryDataset pool = load_binary(p.data);
    const std::string name = infer_name(p.data);
    const EnsembleConfig ec = make_ensemble_config(p.machine, p.k, p.routing, p.seed);
    const PresortedEnsemble ens = PresortedEnsemble::build(pool, ec);
    const fs::path dir = ensure_out_dir(p.out);

    nlohmann::json grid;
    grid["schema"] = "ptm-grid-v1";
    grid["data"] = data_opts_json(p.data, name);
    grid["k"] = ec.k;
    grid["seed"] = ec.seed;
    grid["routing"] = to_string(ec.routing);
    grid["total_clauses_per_class"] = ec.total_clauses_per_class;
    grid["machine_params"] = machine_params_json(ec.machine);
    grid["arrangement"] = ens.arrangement().rows;
    nlohmann::json medoids = nlohmann::json::array();
    for (const auto& row : ens.grid().medoids) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& m : row) r.push_back(m.to_string());
        medoids.push_back(std::move(r));
    }
    grid["grid_medoids"] = std::move(medoids);
    grid["grid_cluster_of"] = ens.grid().cluster_of;
    grid["budgets"] = ens.budgets();
    write_json_file(grid, dir / "grid.json");

    nlohmann::json part;
    part["schema"] = "ptm-partition-v1";
    part["data"] = data_opts_json(p.data, name);
    part["k"] = ec.k;
    part["seed"] = ec.seed;
    std::vector<int> sizes;
    for (const auto& m : ens.members()) sizes.push_back(static_cast<int>(m.size()));
    part["sizes"] = sizes;
    part["budgets"] = ens.budgets();
    part["members"] = ens.members();
    write_json_file(part, dir / "partition.json");

    out << "wrote " << (dir / "grid.json").string() << " and "
        << (dir / "partition.json").string() << " (k=" << ec.k << ", " << pool.size()
        << " points)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
    DataOpts data;
    MachineOpts machine;
    bool baseline = false;
    int k = 2;
    std::string routing = "nearest";
    std::string early_stop = "train";
    double train_fraction = 1.0; // 1.0 = train on everything, no holdout
    bool sequential = false;
    int workers = 0; // 0 -> K
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_train(const TrainOpts& t, std::ostream& out) {
    const EarlyStopMode stop_mode = early_stop_from_string(t.early_stop);
    if (!(t.train_fraction > 0.0 && t.train_fraction <= 1.0))
        throw ConfigError("--train-fraction must be in (0, 1]");
    if (stop_mode == EarlyStopMode::Test && t.train_fraction >= 1.0)
        throw ConfigError("--early-stop test needs a held-out share: set --train-fraction < 1");

    const BinaryDataset pool = load_binary(t.data);
    const std::string name = infer_name(t.data);

    BinaryDataset train_set;
    BinaryDataset holdout; // empty when train_fraction == 1
    if (t.train_fraction < 1.0) {
        auto parts = split(pool, t.train_fraction, derive_seed(t.seed, SeedDomain::Split, 0));
        train_set = std::move(parts.first);
        holdout = std::move(parts.second);
    } else {
        train_set = pool;
    }

    const fs::path dir = ensure_out_dir(t.out);
    nlohmann::json j;
    j["schema"] = "ptm-train-stats-v1";
    j["data"] = data_opts_json(t.data, name);
    j["seed"] = t.seed;
    j["early_stop"] = to_string(stop_mode);
    j["train_fraction"] = t.train_fraction;
    j["train_points"] = train_set.size();

    if (t.baseline) {
        TmParams p;
        p.clauses_per_class = t.machine.clauses;
        p.threshold = t.machine.T;
        p.specificity = t.machine.s;
        p.states = t.machine.states;
        p.epochs = t.machine.epochs;
        p.seed = derive_seed(t.seed, SeedDomain::Machine, 0);
        TsetlinMachine machine(train_set.num_classes, train_set.width, p);

        const BinaryDataset* stop = nullptr;
        if (stop_mode == EarlyStopMode::Train) stop = &train_set;
        if (stop_mode == EarlyStopMode::Test) stop = &holdout;
        const TrainStats ts = machine.train(train_set, p.epochs, stop);

        const fs::path model_path = dir / "model.ptm";
        save_machine(machine, model_path);

        j["type"] = "baseline";
        j["machine_params"] = machine_params_json(p);
        j["clauses_per_class"] = p.clauses_per_class;
        j["stats"] = {{"clause_updates", ts.clause_updates},
                      {"epochs_run", ts.epochs_run},
                      {"early_stopped", ts.early_stopped},
                      {"train_seconds", ts.train_seconds}};
        j["model"] = {{"file", "model.ptm"}, {"digest", fnv1a64_hex(model_path)}};
        if (holdout.size() > 0) j["holdout_accuracy"] = machine.accuracy(holdout);
        write_json_file(j, dir / "train_stats.json");
        out << "trained baseline: " << ts.epochs_run << " epochs, " << ts.clause_updates
            << " clause updates -> " << model_path.string() << "\n";
        return 0;
    }

    const EnsembleConfig ec = make_ensemble_config(t.machine, t.k, t.routing, t.seed);
    PresortedEnsemble ens = PresortedEnsemble::build(train_set, ec);

    TrainOptions to;
    to.sequential = t.sequential;
    to.workers = t.workers > 0 ? t.workers : t.k;
    switch (stop_mode) {
        case EarlyStopMode::Train: break;
        case EarlyStopMode::Test:
            to.paper_mode = true;
            to.test_data = &holdout;
            break;
        case EarlyStopMode::Off: to.early_stop = false; break;
    }
    const UpdateStats us = ens.train(to);
    ens.save(dir);

    j["type"] = "ensemble";
    j["k"] = ec.k;
    j["routing"] = to_string(ec.routing);
    j["total_clauses_per_class"] = ec.total_clauses_per_class;
    j["machine_params"] = machine_params_json(ec.machine);
    j["budgets"] = ens.budgets();
    j["sequential"] = t.sequential;
    j["workers"] = to.workers;
    nlohmann::json per = nlohmann::json::array();
    for (const TrainStats& m : us.per_machine)
        per.push_back({{"clause_updates", m.clause_updates},
                       {"epochs_run", m.epochs_run},
                       {"early_stopped", m.early_stopped},
                       {"train_seconds", m.train_seconds}});
    j["stats"] = {{"clause_updates", us.clause_updates},
                  {"epochs_run", us.epochs_run},
                  {"early_stopped", us.early_stopped},
                  {"wall_seconds", us.wall_seconds},
                  {"peak_resident_machines", us.peak_resident_machines},
                  {"per_machine", std::move(per)}};
    if (holdout.size() > 0) j["holdout_accuracy"] = ens.evaluate(holdout).accuracy;
    write_json_file(j, dir / "train_stats.json");
    out << "trained ensemble (k=" << ec.k << "): " << us.epochs_run << " epochs, "
        << us.clause_updates << " clause updates, peak " << us.peak_resident_machines
        << " resident -> " << dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
    std::string model;
    DataOpts data;
    std::string out; // optional eval.json location
};

int cmd_eval(const EvalOpts& e, std::ostream& out) {
    const BinaryDataset pool = load_binary(e.data);
    const std::string name = infer_name(e.data);

    nlohmann::json j;
    j["schema"] = "ptm-eval-v1";
    j["model"] = e.model;
    j["data"] = data_opts_json(e.data, name);
    j["points"] = pool.size();

    EvalStats stats;
    if (fs::is_directory(e.model)) {
        const PresortedEnsemble ens = PresortedEnsemble::load(e.model);
        stats = ens.evaluate(pool);
        j["type"] = "ensemble";
        j["k"] = ens.k();
        j["routing"] = to_string(ens.config().routing);
    } else {
        const TsetlinMachine machine = load_machine(e.model);
        stats = evaluate_machine(machine, pool);
        j["type"] = "baseline";
    }
    j["accuracy"] = stats.accuracy;
    j["wall_seconds"] = stats.wall_seconds;
    j["clause_evaluations"] = stats.clause_evaluations;

    out << j.dump(2) << "\n";
    if (!e.out.empty()) write_json_file(j, ensure_out_dir(e.out) / "eval.json");
    return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchOpts {
    DataOpts data;
    MachineOpts machine;
    std::vector<int> sweep = {2};
    int repeats = 1;
    double train_fraction = 0.8;
    std::string routing = "nearest";
    std::string early_stop = "train";
    bool sequential = false;
    int workers = 0;
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_benchmark(const BenchOpts& b, std::ostream& out) {
    const BinaryDataset pool = load_binary(b.data);

    BenchmarkConfig cfg;
    cfg.dataset_name = infer_name(b.data);
    cfg.binarize_threshold = b.data.threshold;
    cfg.ks = b.sweep;
    cfg.repeats = b.repeats;
    cfg.train_fraction = b.train_fraction;
    cfg.ensemble = make_ensemble_config(b.machine, b.sweep.empty() ? 1 : b.sweep.front(),
                                        b.routing, b.seed);
    cfg.early_stop = early_stop_from_string(b.early_stop);
    cfg.sequential = b.sequential;
    cfg.workers = b.workers;

    const BenchmarkReport report = run_benchmark(pool, cfg, &out);

    const fs::path dir = ensure_out_dir(b.out);
    write_report_json(report, dir / "report.json");
    write_report_csv(report, dir / "report.csv");
    write_plot_csv(report, dir / "plot_data.csv");

    out << "report: " << (dir / "report.json").string() << "\n";
    for (const MeanRow& m : report.means) {
        out << (m.k == 0 ? std::string("baseline") : "k=" + std::to_string(m.k))
            << " mean accuracy " << m.accuracy << " over " << m.runs << " runs, train_s "
            << m.train_seconds << ", infer_s " << m.infer_seconds << ", updates "
            << m.clause_updates << "\n";
    }
    if (!report.invariants_ok) {
        out << "INVARIANT FAILURES:\n";
        for (const auto& f : report.invariant_failures) out << "  " << f << "\n";
    }
    if (!report.all_cells_ok) out << "some cells FAILED; see report.json\n";
    return report.ok() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// inspect

struct InspectOpts {
    std::string model;
};

int cmd_inspect(const InspectOpts& i, std::ostream& out) {
    nlohmann::json j;
    j["schema"] = "ptm-inspect-v1";
    j["model"] = i.model;

    if (fs::is_directory(i.model)) {
        const PresortedEnsemble ens = PresortedEnsemble::load(i.model);
        j["type"] = "ensemble";
        j["classes"] = ens.num_classes();
        j["width"] = ens.width();
        j["k"] = ens.k();
        j["routing"] = to_string(ens.config().routing);
        j["seed"] = ens.config().seed;
        j["total_clauses_per_class"] = ens.config().total_clauses_per_class;
        j["budgets"] = ens.budgets();
        j["machine_params"] = machine_params_json(ens.config().machine);
        nlohmann::json files = nlohmann::json::array();
        for (int m = 0; m < ens.k(); ++m) {
            const std::string file = "machine_" + std::to_string(m) + ".ptm";
            long long included = 0;
            const TsetlinMachine& tm = ens.machine(m);
            for (int c = 0; c < tm.num_classes(); ++c)
                for (int cl = 0; cl < tm.params().clauses_per_class; ++cl)
                    included += tm.clause(c, cl).included_count();
            files.push_back({{"file", file},
                             {"digest", fnv1a64_hex(fs::path(i.model) / file)},
                             {"clauses_per_class", tm.params().clauses_per_class},
                             {"included_literals", included}});
        }
        j["machines"] = std::move(files);
    } else {
        const TsetlinMachine tm = load_machine(i.model);
        j["type"] = "baseline";
        j["classes"] = tm.num_classes();
        j["width"] = tm.width();
        j["machine_params"] = machine_params_json(tm.params());
        j["clauses_per_class"] = tm.params().clauses_per_class;
        j["seed"] = tm.params().seed;
        j["digest"] = fnv1a64_hex(i.model);
        long long included = 0;
        for (int c = 0; c < tm.num_classes(); ++c)
            for (int cl = 0; cl < tm.params().clauses_per_class; ++cl)
                included += tm.clause(c, cl).included_count();
        j["included_literals"] = included;
    }

    out << j.dump(2) << "\n";
    return 0;
}

} // namespace

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pre-sorted Tsetlin Machine toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI file with long-option defaults ([subcommand] sections); "
                   "command-line flags win");

    GenOpts gen;
    CLI::App* gen_cmd =
        app.add_subcommand("gen", "Write a deterministic synthetic 28x28 corpus (IDX layout)");
    gen_cmd->add_option("--per-class", gen.per_class, "Samples per class")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--modes", gen.modes, "Writing styles per class (pick >= largest K)")
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--noise", gen.noise, "Smudged pixels per sample")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "Corpus seed");
    add_out_opt(gen_cmd, gen.out);

    PrepOpts prep;
    CLI::App* prep_cmd = app.add_subcommand(
        "prep", "Run the three pre-sorting stages and save grid + partition artifacts");
    add_data_opts(prep_cmd, prep.data);
    add_machine_opts(prep_cmd, prep.machine);
    prep_cmd->add_option("--k", prep.k, "Number of machines")->check(CLI::PositiveNumber);
    prep_cmd->add_option("--routing", prep.routing, "nearest | argmax")
        ->check(CLI::IsMember({"nearest", "argmax", "nearest-medoid", "all-machines"}));
    prep_cmd->add_option("--seed", prep.seed, "Master seed");
    add_out_opt(prep_cmd, prep.out);

    TrainOpts train;
    CLI::App* train_cmd =
        app.add_subcommand("train", "Train a pre-sorted ensemble (or --baseline) and save it");
    add_data_opts(train_cmd, train.data);
    add_machine_opts(train_cmd, train.machine);
    train_cmd->add_flag("--baseline", train.baseline,
                        "Train one conventional machine with the full clause budget");
    train_cmd->add_option("--k", train.k, "Number of machines")->check(CLI::PositiveNumber);
    train_cmd->add_option("--routing", train.routing, "nearest | argmax")
        ->check(CLI::IsMember({"nearest", "argmax", "nearest-medoid", "all-machines"}));
    train_cmd->add_option("--early-stop", train.early_stop,
                          "train: stop at 100% on own training data; test: on the held-out "
                          "share (stop decision sees test data); off: never");
    train_cmd->add_option("--train-fraction", train.train_fraction,
                          "Share used for training; the rest is the held-out share");
    train_cmd->add_flag("--sequential", train.sequential,
                        "Train machines one at a time (peak memory: one machine)");
    train_cmd->add_option("--workers", train.workers, "Training threads (0 = one per machine)");
    train_cmd->add_option("--seed", train.seed, "Master seed");
    add_out_opt(train_cmd, train.out);

    EvalOpts eval;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Evaluate a saved model on a dataset (JSON on stdout)");
    eval_cmd->add_option("--model", eval.model, "Model file (.ptm) or ensemble directory")
        ->required();
    add_data_opts(eval_cmd, eval.data);
    eval_cmd->add_option("--out", eval.out, "Also write eval.json into this directory");

    BenchOpts bench;
    CLI::App* bench_cmd = app.add_subcommand(
        "benchmark", "Sweep ensemble sizes against the baseline over repeated fresh splits");
    add_data_opts(bench_cmd, bench.data);
    add_machine_opts(bench_cmd, bench.machine);
    bench_cmd->add_option("--sweep", bench.sweep, "Ensemble sizes, e.g. 2,4,8")
        ->delimiter(',');
    bench_cmd->add_option("--repeats", bench.repeats, "Fresh-split repetitions")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--train-fraction", bench.train_fraction,
                          "Train share of each fresh split");
    bench_cmd->add_option("--routing", bench.routing, "nearest | argmax")
        ->check(CLI::IsMember({"nearest", "argmax", "nearest-medoid", "all-machines"}));
    bench_cmd->add_option("--early-stop", bench.early_stop, "train | test | off");
    bench_cmd->add_flag("--sequential", bench.sequential, "Train machines one at a time");
    bench_cmd->add_option("--workers", bench.workers, "Training threads (0 = one per machine)");
    bench_cmd->add_option("--seed", bench.seed, "Master seed");
    add_out_opt(bench_cmd, bench.out);

    InspectOpts inspect;
    CLI::App* inspect_cmd =
        app.add_subcommand("inspect", "Describe a saved model (JSON on stdout)");
    inspect_cmd->add_option("--model", inspect.model, "Model file (.ptm) or ensemble directory")
        ->required();

    int rc = 0;
    gen_cmd->callback([&] { rc = cmd_gen(gen, out); });
    prep_cmd->callback([&] { rc = cmd_prep(prep, out); });
    train_cmd->callback([&] { rc = cmd_train(train, out); });
    eval_cmd->callback([&] { rc = cmd_eval(eval, out); });
    bench_cmd->callback([&] { rc = cmd_benchmark(bench, out); });
    inspect_cmd->callback([&] { rc = cmd_inspect(inspect, out); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) { // covers input ParseError too
        err << "input error: " << e.what() << "\n";
        return 3;
    } catch (const ContractError& e) {
        err << "internal contract violated: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

} // namespace ptm
