// End-to-end tests for the command-line interface, run in-process through
// run_cli so exit codes and both output streams can be asserted directly.
//
// One small generated corpus (120 samples, 10 classes) is shared by most
// cases; every command writes into its own temporary directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ptm/cli.hpp"
#include "ptm/csv.hpp"
#include "ptm/serialize.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;

namespace {

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int rc = ptm::run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

// Generated once, reused by every case in this file.
const std::string& corpus_dir() {
    static fixtures::TempDir dir;
    static bool generated = false;
    if (!generated) {
        REQUIRE(cli({"gen", "--per-class", "12", "--modes", "2", "--noise", "32",
                     "--seed", "3", "--out", dir.path().string()}) == 0);
        generated = true;
    }
    static const std::string path = dir.path().string();
    return path;
}

// Fast machine settings for CLI-level training runs.
std::vector<std::string> fast_machine() {
    return {"--clauses", "20", "--T", "5", "--s", "3", "--states", "100",
            "--epochs", "8"};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

nlohmann::json parse_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path.string());
    return nlohmann::json::parse(in);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("cli: --help exits 0 and lists the subcommands") {
    std::string out;
    CHECK(cli({"--help"}, &out) == 0);
    for (const char* name : {"gen", "prep", "train", "eval", "benchmark", "inspect"})
        CHECK(out.find(name) != std::string::npos);
}

TEST_CASE("cli: usage errors exit 2") {
    std::string err;
    CHECK(cli({}) == 2);                               // a subcommand is required
    CHECK(cli({"train", "--no-such-flag"}) == 2);      // unknown option
    CHECK(cli({"eval", "--model", "x", "--dataset", "y", "--format", "xml"}) == 2);
    CHECK(cli({"prep", "--k", "2"}, nullptr, &err) == 2); // --dataset is required
    CHECK(!err.empty());
}

TEST_CASE("cli: missing dataset paths exit 3") {
    fixtures::TempDir dir;
    CHECK(cli({"train", "--baseline", "--dataset", dir.file("nope.csv"), "--out",
               dir.file("out")}) == 3);
    CHECK(cli({"prep", "--dataset", dir.file("nodir"), "--format", "idx", "--out",
               dir.file("out")}) == 3);
}

TEST_CASE("cli gen: deterministic per seed, distinct across seeds") {
    fixtures::TempDir a;
    fixtures::TempDir b;
    fixtures::TempDir c;
    REQUIRE(cli({"gen", "--per-class", "3", "--seed", "5", "--out", a.path().string()}) == 0);
    REQUIRE(cli({"gen", "--per-class", "3", "--seed", "5", "--out", b.path().string()}) == 0);
    REQUIRE(cli({"gen", "--per-class", "3", "--seed", "6", "--out", c.path().string()}) == 0);
    const std::string img = "train-images-idx3-ubyte";
    const std::string lab = "train-labels-idx1-ubyte";
    CHECK(ptm::fnv1a64_hex(a.path() / img) == ptm::fnv1a64_hex(b.path() / img));
    CHECK(ptm::fnv1a64_hex(a.path() / lab) == ptm::fnv1a64_hex(b.path() / lab));
    CHECK(ptm::fnv1a64_hex(a.path() / img) != ptm::fnv1a64_hex(c.path() / img));
}

TEST_CASE("cli prep: grid and partition files describe an exact set-partition") {
    fixtures::TempDir dir;
    std::string out;
    REQUIRE(cli({"prep", "--dataset", corpus_dir(), "--k", "2", "--seed", "11",
                 "--out", dir.path().string()}, &out) == 0);
    CHECK(out.find("grid.json") != std::string::npos);

    nlohmann::json grid = parse_file(dir.path() / "grid.json");
    CHECK(grid["schema"] == "ptm-grid-v1");
    CHECK(grid["k"] == 2);
    CHECK(grid["grid_medoids"].size() == 10); // one row of K medoids per class
    for (const auto& row : grid["grid_medoids"]) CHECK(row.size() == 2);
    int budget_sum = 0;
    for (const auto& b : grid["budgets"]) {
        const int budget = b.get<int>();
        CHECK(budget >= 2);
        CHECK(budget % 2 == 0);
        budget_sum += budget;
    }
    CHECK(budget_sum == grid["total_clauses_per_class"].get<int>());

    nlohmann::json part = parse_file(dir.path() / "partition.json");
    CHECK(part["schema"] == "ptm-partition-v1");
    REQUIRE(part["members"].size() == 2);
    std::vector<int> seen;
    for (const auto& machine : part["members"]) {
        std::vector<int> members = machine.get<std::vector<int>>();
        CHECK(std::is_sorted(members.begin(), members.end()));
        seen.insert(seen.end(), members.begin(), members.end());
    }
    std::sort(seen.begin(), seen.end());
    std::vector<int> expect(120);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(seen == expect); // every point assigned exactly once

    // Same inputs, second run: byte-identical files.
    fixtures::TempDir rerun;
    REQUIRE(cli({"prep", "--dataset", corpus_dir(), "--k", "2", "--seed", "11",
                 "--out", rerun.path().string()}) == 0);
    CHECK(read_file(dir.path() / "grid.json") == read_file(rerun.path() / "grid.json"));
    CHECK(read_file(dir.path() / "partition.json") ==
          read_file(rerun.path() / "partition.json"));
}

TEST_CASE("cli prep: a K larger than the smallest class exits 4") {
    fixtures::TempDir dir;
    std::string err;
    CHECK(cli({"prep", "--dataset", corpus_dir(), "--k", "20", "--out",
               dir.path().string()}, nullptr, &err) == 4);
    CHECK(err.find("contract") != std::string::npos);
}

TEST_CASE("cli train/eval: baseline round trip with verifiable digest") {
    fixtures::TempDir dir;
    std::string out;
    REQUIRE(cli(cat({"train", "--baseline", "--dataset", corpus_dir(), "--out",
                     dir.path().string()},
                    fast_machine()), &out) == 0);
    CHECK(out.find("trained baseline") != std::string::npos);
    REQUIRE(fs::exists(dir.path() / "model.ptm"));

    nlohmann::json stats = parse_file(dir.path() / "train_stats.json");
    CHECK(stats["schema"] == "ptm-train-stats-v1");
    CHECK(stats["type"] == "baseline");
    CHECK(stats["machine_params"]["epochs"] == 8);
    CHECK(stats["stats"]["epochs_run"].get<int>() >= 1);
    CHECK(stats["stats"]["clause_updates"].get<long long>() > 0);
    // The recorded digest matches the file actually on disk.
    CHECK(stats["model"]["digest"] == ptm::fnv1a64_hex(dir.path() / "model.ptm"));

    std::string eval_out;
    REQUIRE(cli({"eval", "--model", (dir.path() / "model.ptm").string(), "--dataset",
                 corpus_dir()}, &eval_out) == 0);
    nlohmann::json ev = nlohmann::json::parse(eval_out);
    CHECK(ev["schema"] == "ptm-eval-v1");
    CHECK(ev["type"] == "baseline");
    CHECK(ev["points"] == 120);
    CHECK(ev["accuracy"].get<double>() > 0.8); // relearns its own training set
    CHECK(ev["accuracy"].get<double>() <= 1.0);

    // --out also writes eval.json with the same content.
    fixtures::TempDir evdir;
    REQUIRE(cli({"eval", "--model", (dir.path() / "model.ptm").string(), "--dataset",
                 corpus_dir(), "--out", evdir.path().string()}) == 0);
    nlohmann::json evfile = parse_file(evdir.path() / "eval.json");
    CHECK(evfile["accuracy"] == ev["accuracy"]);
}

TEST_CASE("cli train/eval/inspect: ensemble round trip") {
    fixtures::TempDir dir;
    std::string out;
    REQUIRE(cli(cat({"train", "--dataset", corpus_dir(), "--k", "2",
                     "--train-fraction", "0.8", "--seed", "4", "--out",
                     dir.path().string()},
                    fast_machine()), &out) == 0);
    CHECK(out.find("trained ensemble (k=2)") != std::string::npos);
    REQUIRE(fs::exists(dir.path() / "manifest.json"));
    REQUIRE(fs::exists(dir.path() / "machine_0.ptm"));
    REQUIRE(fs::exists(dir.path() / "machine_1.ptm"));

    nlohmann::json stats = parse_file(dir.path() / "train_stats.json");
    CHECK(stats["type"] == "ensemble");
    CHECK(stats["k"] == 2);
    REQUIRE(stats["budgets"].size() == 2);
    CHECK(stats["budgets"][0].get<int>() + stats["budgets"][1].get<int>() == 20);
    CHECK(stats["stats"]["per_machine"].size() == 2);
    CHECK(stats.contains("holdout_accuracy")); // train fraction < 1 keeps a holdout

    std::string eval_out;
    REQUIRE(cli({"eval", "--model", dir.path().string(), "--dataset", corpus_dir()},
                &eval_out) == 0);
    nlohmann::json ev = nlohmann::json::parse(eval_out);
    CHECK(ev["type"] == "ensemble");
    CHECK(ev["k"] == 2);
    // Plumbing test, not a quality bar: just demand clearly-above-chance
    // output from a deliberately tiny machine (10 classes -> chance is 0.1).
    CHECK(ev["accuracy"].get<double>() > 0.3);

    std::string ins_out;
    REQUIRE(cli({"inspect", "--model", dir.path().string()}, &ins_out) == 0);
    nlohmann::json ins = nlohmann::json::parse(ins_out);
    CHECK(ins["schema"] == "ptm-inspect-v1");
    CHECK(ins["type"] == "ensemble");
    CHECK(ins["k"] == 2);
    REQUIRE(ins["machines"].size() == 2);
    for (int m = 0; m < 2; ++m) {
        const auto& entry = ins["machines"][static_cast<std::size_t>(m)];
        // Digest printed by inspect matches the bytes on disk.
        CHECK(entry["digest"] ==
              ptm::fnv1a64_hex(dir.path() / entry["file"].get<std::string>()));
        CHECK(entry["included_literals"].get<long long>() > 0);
    }
}

TEST_CASE("cli train: routed-test early stopping requires a held-out split") {
    fixtures::TempDir dir;
    std::string err;
    CHECK(cli(cat({"train", "--dataset", corpus_dir(), "--k", "2", "--early-stop",
                   "test", "--out", dir.path().string()},
                  fast_machine()), nullptr, &err) == 2);
    CHECK(err.find("config error") != std::string::npos);
}

TEST_CASE("cli train: sequential spill produces the same machines as parallel") {
    fixtures::TempDir seq;
    fixtures::TempDir par;
    const std::vector<std::string> common =
        cat({"train", "--dataset", corpus_dir(), "--k", "2", "--train-fraction",
             "0.8", "--seed", "4"},
            fast_machine());
    REQUIRE(cli(cat(common, {"--sequential", "--out", seq.path().string()})) == 0);
    REQUIRE(cli(cat(common, {"--out", par.path().string()})) == 0);

    nlohmann::json ms = parse_file(seq.path() / "manifest.json");
    nlohmann::json mp = parse_file(par.path() / "manifest.json");
    REQUIRE(ms["machines"].size() == 2);
    for (std::size_t m = 0; m < 2; ++m)
        CHECK(ms["machines"][m]["digest"] == mp["machines"][m]["digest"]);

    CHECK(parse_file(seq.path() / "train_stats.json")["stats"]["peak_resident_machines"] == 1);
    CHECK(parse_file(par.path() / "train_stats.json")["stats"]["peak_resident_machines"] == 2);
}

TEST_CASE("cli benchmark: sweep writes the three report files and exits 0") {
    fixtures::TempDir dir;
    std::string out;
    REQUIRE(cli({"benchmark", "--dataset", corpus_dir(), "--sweep", "1,2",
                 "--repeats", "2", "--clauses", "20", "--T", "5", "--s", "3",
                 "--epochs", "4", "--seed", "9", "--out", dir.path().string()},
                &out) == 0);
    CHECK(out.find("baseline mean accuracy") != std::string::npos);
    CHECK(out.find("k=2 mean accuracy") != std::string::npos);

    nlohmann::json report = parse_file(dir.path() / "report.json");
    CHECK(report["schema"] == "ptm-benchmark-report-v1");
    CHECK(report["all_cells_ok"] == true);
    CHECK(report["invariants_ok"] == true);
    CHECK(report["rows"].size() == 6); // 2 repeats x (baseline, k=1, k=2)

    std::ifstream csv(dir.path() / "report.csv");
    REQUIRE(csv.good());
    int csv_lines = 0;
    for (std::string line; std::getline(csv, line);) ++csv_lines;
    CHECK(csv_lines == 7);

    std::ifstream plot(dir.path() / "plot_data.csv");
    REQUIRE(plot.good());
    int plot_lines = 0;
    for (std::string line; std::getline(plot, line);) ++plot_lines;
    CHECK(plot_lines == 4); // header + baseline + two sweep points
}

TEST_CASE("cli benchmark: an unbuildable cell is reported and exits 1") {
    fixtures::TempDir dir;
    std::string out;
    // Half of 12 points per class cannot supply ten grid medoids.
    CHECK(cli({"benchmark", "--dataset", corpus_dir(), "--sweep", "10",
               "--repeats", "1", "--train-fraction", "0.5", "--clauses", "20",
               "--T", "5", "--s", "3", "--epochs", "4", "--seed", "9", "--out",
               dir.path().string()}, &out) == 1);
    CHECK(out.find("FAILED") != std::string::npos);
    nlohmann::json report = parse_file(dir.path() / "report.json");
    CHECK(report["all_cells_ok"] == false);
}

TEST_CASE("cli: config file supplies defaults, flags override them") {
    fixtures::TempDir dir;
    std::ofstream(dir.file("cfg.ini")) << "[train]\nepochs=7\n";

    REQUIRE(cli({"--config", dir.file("cfg.ini"), "train", "--baseline", "--dataset",
                 corpus_dir(), "--clauses", "20", "--T", "5", "--s", "3", "--states",
                 "100", "--out", dir.file("from_config")}) == 0);
    CHECK(parse_file(dir.path() / "from_config" / "train_stats.json")
              ["machine_params"]["epochs"] == 7);

    REQUIRE(cli({"--config", dir.file("cfg.ini"), "train", "--baseline", "--dataset",
                 corpus_dir(), "--clauses", "20", "--T", "5", "--s", "3", "--states",
                 "100", "--epochs", "9", "--out", dir.file("from_flag")}) == 0);
    CHECK(parse_file(dir.path() / "from_flag" / "train_stats.json")
              ["machine_params"]["epochs"] == 9);
}

TEST_CASE("cli: PTM_OUT provides the output directory when --out is absent") {
    fixtures::TempDir dir;
    const std::string target = dir.file("from_env");
    const char* previous = std::getenv("PTM_OUT");
    const std::string saved = previous ? previous : "";
    REQUIRE(setenv("PTM_OUT", target.c_str(), 1) == 0);
    const int rc = cli({"gen", "--per-class", "2", "--seed", "1"});
    if (previous)
        setenv("PTM_OUT", saved.c_str(), 1);
    else
        unsetenv("PTM_OUT");
    CHECK(rc == 0);
    CHECK(fs::exists(fs::path(target) / "train-images-idx3-ubyte"));
}

TEST_CASE("cli eval: a truncated model file exits 3") {
    fixtures::TempDir dir;
    REQUIRE(cli(cat({"train", "--baseline", "--dataset", corpus_dir(), "--out",
                     dir.path().string()},
                    fast_machine())) == 0);
    const std::string whole = read_file(dir.path() / "model.ptm");
    std::ofstream(dir.file("broken.ptm"), std::ios::binary) << whole.substr(0, 10);
    std::string err;
    CHECK(cli({"eval", "--model", dir.file("broken.ptm"), "--dataset", corpus_dir()},
              nullptr, &err) == 3);
    CHECK(err.find("input error") != std::string::npos);
}

TEST_CASE("cli train: CSV datasets ride the same pipeline") {
    fixtures::TempDir dir;
    ptm::RawDataset raw = fixtures::raw_grayscale_dataset(2, 10, 16, 5);
    ptm::write_csv(dir.file("tiny.csv"), raw);
    REQUIRE(cli({"train", "--baseline", "--dataset", dir.file("tiny.csv"),
                 "--threshold", "128", "--clauses", "8", "--T", "3", "--s", "3",
                 "--states", "64", "--epochs", "3", "--out", dir.file("out")}) == 0);
    CHECK(fs::exists(dir.path() / "out" / "model.ptm"));
    nlohmann::json stats = parse_file(dir.path() / "out" / "train_stats.json");
    CHECK(stats["data"]["name"] == "tiny");
    CHECK(stats["data"]["threshold"] == 128);
}

TEST_CASE("cli train: --limit truncates the pool before training") {
    fixtures::TempDir dir;
    REQUIRE(cli(cat({"train", "--baseline", "--dataset", corpus_dir(), "--limit",
                     "40", "--out", dir.path().string()},
                    fast_machine())) == 0);
    nlohmann::json stats = parse_file(dir.path() / "train_stats.json");
    CHECK(stats["data"]["limit"] == 40);
    CHECK(stats["train_points"] == 40);
}
