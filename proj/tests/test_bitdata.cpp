#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <vector>

#include "ptm/bitvector.hpp"
#include "ptm/csv.hpp"
#include "ptm/dataset.hpp"
#include "ptm/errors.hpp"
#include "ptm/idx.hpp"
#include "ptm/rand.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace ptm;

TEST_CASE("bitvector packing round-trips through get/set and strings") {
    BitVector v(130);
    CHECK(v.width() == 130);
    CHECK(v.word_count() == 3);
    CHECK(v.popcount() == 0);
    v.set(0, true);
    v.set(63, true);
    v.set(64, true);
    v.set(129, true);
    CHECK(v.popcount() == 4);
    CHECK(v.get(0));
    CHECK(v.get(63));
    CHECK(v.get(64));
    CHECK(v.get(129));
    CHECK_FALSE(v.get(1));
    v.set(63, false);
    CHECK(v.popcount() == 3);

    const BitVector w = BitVector::from_string("1010");
    CHECK(w.get(0));
    CHECK_FALSE(w.get(1));
    CHECK(w.get(2));
    CHECK_FALSE(w.get(3));
    CHECK(w.to_string() == "1010");
    CHECK(BitVector::from_string(v.to_string()) == v);
}

TEST_CASE("bitvector rejects out-of-range indices and bad strings") {
    BitVector v(8);
    CHECK_THROWS_AS(v.get(-1), ContractError);
    CHECK_THROWS_AS(v.get(8), ContractError);
    CHECK_THROWS_AS(v.set(8, true), ContractError);
    CHECK_THROWS_AS(BitVector::from_string("10x1"), ContractError);
}

TEST_CASE("hamming distance of a vector with itself is zero") {
    Rng rng(7);
    for (int width : {1, 64, 65, 200}) {
        const BitVector v = fixtures::random_bitvector(width, rng);
        CHECK(hamming_distance(v, v) == 0);
    }
}

TEST_CASE("hamming distance of complementary vectors equals the width") {
    const BitVector a = BitVector::from_string("1010");
    const BitVector b = BitVector::from_string("0101");
    CHECK(hamming_distance(a, b) == 4);
}

TEST_CASE("hamming distance on a random 128-bit pair matches the per-bit oracle") {
    Rng rng(42);
    const BitVector a = fixtures::random_bitvector(128, rng);
    const BitVector b = fixtures::random_bitvector(128, rng);
    CHECK(hamming_distance(a, b) == oracle::naive_hamming(a, b));
}

TEST_CASE("hamming distance rejects width mismatch") {
    const BitVector a(4);
    const BitVector b(5);
    CHECK_THROWS_AS(hamming_distance(a, b), ContractError);
}

TEST_CASE("packed hamming kernel equals the per-bit oracle on 1000 random pairs") {
    Rng rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const int width = 1 + rand_index(rng, 192);
        const BitVector a = fixtures::random_bitvector(width, rng);
        const BitVector b = fixtures::random_bitvector(width, rng);
        const int fast = hamming_distance(a, b);
        CHECK(fast == oracle::naive_hamming(a, b));
        CHECK(fast <= width);
        CHECK(fast >= 0);
    }
}

TEST_CASE("hamming distance is symmetric and satisfies the triangle inequality") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const int width = 1 + rand_index(rng, 150);
        const BitVector a = fixtures::random_bitvector(width, rng);
        const BitVector b = fixtures::random_bitvector(width, rng);
        const BitVector c = fixtures::random_bitvector(width, rng);
        CHECK(hamming_distance(a, b) == hamming_distance(b, a));
        CHECK(hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c));
    }
}

TEST_CASE("binarize applies the >= threshold rule") {
    RawDataset raw;
    raw.samples = {{0, 74, 75, 255}};
    raw.labels = {0};
    raw.num_classes = 1;
    raw.width = 4;
    const BinaryDataset out = binarize(raw, 75);
    CHECK(out.points.at(0).to_string() == "0011");
    CHECK(out.labels == raw.labels);
    CHECK(out.width == 4);
    CHECK(out.num_classes == 1);
}

TEST_CASE("binarize threshold 0 sets every bit for nonnegative samples") {
    RawDataset raw;
    raw.samples = {{0, 1, 128, 255}};
    raw.labels = {0};
    raw.num_classes = 1;
    raw.width = 4;
    CHECK(binarize(raw, 0).points.at(0).to_string() == "1111");
}

TEST_CASE("binarize threshold 256 clears every bit for 8-bit samples") {
    RawDataset raw;
    raw.samples = {{0, 1, 128, 255}};
    raw.labels = {0};
    raw.num_classes = 1;
    raw.width = 4;
    CHECK(binarize(raw, 256).points.at(0).to_string() == "0000");
}

TEST_CASE("binarize rejects an empty dataset") {
    RawDataset raw;
    CHECK_THROWS_AS(binarize(raw, 75), ContractError);
}

TEST_CASE("binarize is idempotent when its 0/1 output is re-thresholded at 1") {
    const RawDataset raw = fixtures::raw_grayscale_dataset(3, 5, 30, 11);
    const BinaryDataset once = binarize(raw, 75);
    RawDataset rebinarized;
    rebinarized.num_classes = once.num_classes;
    rebinarized.width = once.width;
    rebinarized.labels = once.labels;
    for (const BitVector& p : once.points) {
        std::vector<int> sample(static_cast<std::size_t>(p.width()));
        for (int i = 0; i < p.width(); ++i) sample[static_cast<std::size_t>(i)] = p.get(i) ? 1 : 0;
        rebinarized.samples.push_back(std::move(sample));
    }
    const BinaryDataset twice = binarize(rebinarized, 1);
    CHECK(twice.points == once.points);
    CHECK(twice.labels == once.labels);
}

TEST_CASE("idx image/label pair round-trips through write and load") {
    fixtures::TempDir dir;
    RawDataset data;
    data.samples = {{0, 255, 10, 20}, {1, 2, 3, 4}, {250, 251, 252, 253}, {9, 8, 7, 6}};
    data.labels = {0, 1, 1, 0};
    data.num_classes = 2;
    data.width = 4;
    const std::string images = dir.file("images.idx");
    const std::string labels = dir.file("labels.idx");
    write_idx(images, labels, data, 2, 2);

    const RawDataset loaded = load_idx(images, labels);
    CHECK(loaded.size() == 4);
    CHECK(loaded.width == 4);
    CHECK(loaded.num_classes == 2);
    CHECK(loaded.samples == data.samples);
    CHECK(loaded.labels == data.labels);
}

TEST_CASE("idx loader reports a bad magic number") {
    fixtures::TempDir dir;
    const std::string images = dir.file("bad.idx");
    const std::string labels = dir.file("labels.idx");
    {
        std::ofstream out(images, std::ios::binary);
        const char bytes[] = {0, 0, 9, 9, 0, 0, 0, 0};
        out.write(bytes, sizeof(bytes));
    }
    {
        std::ofstream out(labels, std::ios::binary);
        const char bytes[] = {0, 0, 8, 1, 0, 0, 0, 0};
        out.write(bytes, sizeof(bytes));
    }
    CHECK_THROWS_WITH_AS(load_idx(images, labels), doctest::Contains("magic"), ParseError);
}

TEST_CASE("idx loader reports truncation") {
    fixtures::TempDir dir;
    RawDataset data;
    data.samples = {{0, 255, 10, 20}, {1, 2, 3, 4}};
    data.labels = {0, 1};
    data.num_classes = 2;
    data.width = 4;
    const std::string images = dir.file("images.idx");
    const std::string labels = dir.file("labels.idx");
    write_idx(images, labels, data, 2, 2);

    // Chop the image payload short.
    std::ifstream in(images, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    bytes.resize(bytes.size() - 3);
    std::ofstream out(images, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();

    CHECK_THROWS_WITH_AS(load_idx(images, labels), doctest::Contains("truncated"), ParseError);
}

TEST_CASE("idx loader reports image/label count mismatch") {
    fixtures::TempDir dir;
    RawDataset data;
    data.samples = {{0, 255, 10, 20}, {1, 2, 3, 4}};
    data.labels = {0, 1};
    data.num_classes = 2;
    data.width = 4;
    RawDataset fewer;
    fewer.samples = {{0, 255, 10, 20}};
    fewer.labels = {0};
    fewer.num_classes = 1;
    fewer.width = 4;
    const std::string images = dir.file("images.idx");
    const std::string labels = dir.file("labels.idx");
    const std::string labels_short = dir.file("labels_short.idx");
    write_idx(images, labels, data, 2, 2);
    write_idx(dir.file("images_short.idx"), labels_short, fewer, 2, 2);
    CHECK_THROWS_WITH_AS(load_idx(images, labels_short), doctest::Contains("mismatch"), ParseError);
}

TEST_CASE("csv round-trips a dataset and reports malformed rows") {
    fixtures::TempDir dir;
    const RawDataset data = fixtures::raw_grayscale_dataset(2, 3, 5, 3);
    const std::string path = dir.file("data.csv");
    write_csv(path, data);
    const RawDataset loaded = load_csv(path);
    CHECK(loaded.samples == data.samples);
    CHECK(loaded.labels == data.labels);
    CHECK(loaded.width == data.width);
    CHECK(loaded.num_classes == data.num_classes);

    {
        std::ofstream out(dir.file("ragged.csv"));
        out << "label,f0,f1\n0,1,2\n1,3\n";
    }
    CHECK_THROWS_WITH_AS(load_csv(dir.file("ragged.csv")), doctest::Contains("ragged"), ParseError);

    {
        std::ofstream out(dir.file("noninteger.csv"));
        out << "label,f0\n0,abc\n";
    }
    CHECK_THROWS_AS(load_csv(dir.file("noninteger.csv")), ParseError);

    {
        std::ofstream out(dir.file("empty.csv"));
        out << "label,f0\n";
    }
    CHECK_THROWS_AS(load_csv(dir.file("empty.csv")), ParseError);

    CHECK_THROWS_AS(load_csv(dir.file("does_not_exist.csv")), IoError);
}

TEST_CASE("split with fraction 0.8 puts 8 of 10 points in train") {
    const BinaryDataset data = fixtures::hamming_ball_dataset(2, 5, 16, 2, 5);
    const auto [train, test] = split(data, 0.8, 77);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);
    CHECK(train.num_classes == 2);
    CHECK(test.num_classes == 2);
}

TEST_CASE("split is deterministic for a fixed seed") {
    const BinaryDataset data = fixtures::hamming_ball_dataset(3, 8, 24, 3, 6);
    const auto [train_a, test_a] = split(data, 0.8, 123);
    const auto [train_b, test_b] = split(data, 0.8, 123);
    CHECK(train_a.points == train_b.points);
    CHECK(train_a.labels == train_b.labels);
    CHECK(test_a.points == test_b.points);
    CHECK(test_a.labels == test_b.labels);
}

TEST_CASE("split partitions differ across seeds for n >= 20") {
    const BinaryDataset data = fixtures::hamming_ball_dataset(2, 12, 24, 3, 6);
    REQUIRE(data.size() >= 20);
    const auto [train_a, test_a] = split(data, 0.8, 1);
    const auto [train_b, test_b] = split(data, 0.8, 2);
    CHECK(train_a.points != train_b.points);
}

TEST_CASE("split is an exact partition with every class on both sides") {
    const BinaryDataset data = fixtures::hamming_ball_dataset(4, 7, 32, 4, 9);
    const auto [train, test] = split(data, 0.8, 31);
    CHECK(train.size() + test.size() == data.size());

    // Every original point is recovered exactly once (multiset equality).
    std::vector<std::string> original, recombined;
    for (int i = 0; i < data.size(); ++i)
        original.push_back(std::to_string(data.labels[static_cast<std::size_t>(i)]) + ":" +
                           data.points[static_cast<std::size_t>(i)].to_string());
    for (int i = 0; i < train.size(); ++i)
        recombined.push_back(std::to_string(train.labels[static_cast<std::size_t>(i)]) + ":" +
                             train.points[static_cast<std::size_t>(i)].to_string());
    for (int i = 0; i < test.size(); ++i)
        recombined.push_back(std::to_string(test.labels[static_cast<std::size_t>(i)]) + ":" +
                             test.points[static_cast<std::size_t>(i)].to_string());
    std::sort(original.begin(), original.end());
    std::sort(recombined.begin(), recombined.end());
    CHECK(original == recombined);

    const auto train_by_class = train.indices_by_class();
    const auto test_by_class = test.indices_by_class();
    for (int c = 0; c < data.num_classes; ++c) {
        CHECK(!train_by_class[static_cast<std::size_t>(c)].empty());
        CHECK(!test_by_class[static_cast<std::size_t>(c)].empty());
    }
}

TEST_CASE("split rejects fractions outside (0,1) and classes it would empty") {
    const BinaryDataset data = fixtures::hamming_ball_dataset(2, 5, 16, 2, 5);
    CHECK_THROWS_AS(split(data, 0.0, 1), ContractError);
    CHECK_THROWS_AS(split(data, 1.0, 1), ContractError);

    BinaryDataset tiny;
    tiny.width = 4;
    tiny.num_classes = 2;
    tiny.points = {BitVector::from_string("0000"), BitVector::from_string("1111"),
                   BitVector::from_string("1010")};
    tiny.labels = {0, 0, 1};
    CHECK_THROWS_AS(split(tiny, 0.8, 1), ContractError);
}

TEST_CASE("seed derivation separates domains and indices") {
    std::set<std::uint64_t> seen;
    for (auto domain : {SeedDomain::Split, SeedDomain::Dispersion, SeedDomain::Alignment,
                        SeedDomain::Machine, SeedDomain::Run, SeedDomain::Data})
        for (std::uint64_t index = 0; index < 8; ++index)
            seen.insert(derive_seed(42, domain, index));
    CHECK(seen.size() == 48);
    CHECK(derive_seed(42, SeedDomain::Machine, 0) == derive_seed(42, SeedDomain::Machine, 0));
    CHECK(derive_seed(42, SeedDomain::Machine, 0) != derive_seed(43, SeedDomain::Machine, 0));
}

TEST_CASE("rand_below stays in range and covers small supports") {
    Rng rng(5);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t v = rand_below(rng, 7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS_AS(rand_below(rng, 0), ContractError);
}

TEST_CASE("sample_distinct returns sorted unique values in range") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + rand_index(rng, 30);
        const int k = rand_index(rng, n + 1);
        const auto got = sample_distinct(rng, n, k);
        CHECK(static_cast<int>(got.size()) == k);
        CHECK(std::is_sorted(got.begin(), got.end()));
        CHECK(std::adjacent_find(got.begin(), got.end()) == got.end());
        for (int v : got) {
            CHECK(v >= 0);
            CHECK(v < n);
        }
    }
}
