#include "ptm/dataset.hpp"

#include <cmath>
#include <string>

#include "ptm/rand.hpp"

namespace ptm {

namespace {

void check_labels(const std::vector<int>& labels, int num_classes) {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes)
            throw ContractError("dataset: label " + std::to_string(y) +
                                " outside [0, " + std::to_string(num_classes) + ")");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (int c = 0; c < num_classes; ++c)
        if (counts[static_cast<std::size_t>(c)] == 0)
            throw ContractError("dataset: class " + std::to_string(c) + " has no samples");
}

} // namespace

void RawDataset::validate() const {
    if (samples.empty()) throw ContractError("RawDataset: empty");
    if (samples.size() != labels.size())
        throw ContractError("RawDataset: samples/labels size mismatch");
    if (num_classes <= 0) throw ContractError("RawDataset: num_classes must be positive");
    for (const auto& s : samples)
        if (static_cast<int>(s.size()) != width)
            throw ContractError("RawDataset: sample width " + std::to_string(s.size()) +
                                " != " + std::to_string(width));
    check_labels(labels, num_classes);
}

void BinaryDataset::validate() const {
    if (points.empty()) throw ContractError("BinaryDataset: empty");
    if (points.size() != labels.size())
        throw ContractError("BinaryDataset: points/labels size mismatch");
    if (num_classes <= 0) throw ContractError("BinaryDataset: num_classes must be positive");
    for (const auto& p : points)
        if (p.width() != width) throw ContractError("BinaryDataset: point width mismatch");
    check_labels(labels, num_classes);
}

std::vector<std::vector<int>> BinaryDataset::indices_by_class() const {
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(num_classes));
    for (int i = 0; i < size(); ++i)
        by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
    return by_class;
}

BinaryDataset binarize(const RawDataset& raw, int threshold) {
    if (raw.samples.empty()) throw ContractError("binarize: empty dataset");
    raw.validate();

    BinaryDataset out;
    out.num_classes = raw.num_classes;
    out.width = raw.width;
    out.labels = raw.labels;
    out.points.reserve(raw.samples.size());
    for (const auto& sample : raw.samples) {
        BitVector v(raw.width);
        for (int i = 0; i < raw.width; ++i)
            if (sample[static_cast<std::size_t>(i)] >= threshold) v.set(i, true);
        out.points.push_back(std::move(v));
    }
    return out;
}

std::pair<BinaryDataset, BinaryDataset> split(const BinaryDataset& data,
                                              double train_fraction,
                                              std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ContractError("split: train_fraction must lie in (0, 1)");
    data.validate();

    Rng rng = make_rng(seed);
    std::vector<bool> in_train(static_cast<std::size_t>(data.size()), false);

    const auto by_class = data.indices_by_class();
    for (int c = 0; c < data.num_classes; ++c) {
        auto members = by_class[static_cast<std::size_t>(c)];
        const int n = static_cast<int>(members.size());
        if (n < 2)
            throw ContractError("split: class " + std::to_string(c) +
                                " has fewer than 2 points; split would empty it");
        int n_train = static_cast<int>(std::lround(n * train_fraction));
        if (n_train < 1) n_train = 1;
        if (n_train > n - 1) n_train = n - 1;
        shuffle_in_place(rng, members);
        for (int i = 0; i < n_train; ++i)
            in_train[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = true;
    }

    BinaryDataset train, test;
    train.num_classes = test.num_classes = data.num_classes;
    train.width = test.width = data.width;
    for (int i = 0; i < data.size(); ++i) {
        auto& side = in_train[static_cast<std::size_t>(i)] ? train : test;
        side.points.push_back(data.points[static_cast<std::size_t>(i)]);
        side.labels.push_back(data.labels[static_cast<std::size_t>(i)]);
    }
    return {std::move(train), std::move(test)};
}

} // namespace ptm
