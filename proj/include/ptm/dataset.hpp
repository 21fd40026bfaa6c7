#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ptm/bitvector.hpp"

namespace ptm {

/// Integer-valued feature vectors (e.g. 0-255 pixel intensities) with class
/// labels in [0, num_classes).
struct RawDataset {
    std::vector<std::vector<int>> samples;
    std::vector<int> labels;
    int num_classes = 0;
    int width = 0;

    int size() const { return static_cast<int>(samples.size()); }
    void validate() const;
};

/// Binarized, bit-packed datapoints with class labels.
struct BinaryDataset {
    std::vector<BitVector> points;
    std::vector<int> labels;
    int num_classes = 0;
    int width = 0;

    int size() const { return static_cast<int>(points.size()); }
    void validate() const;

    // Original point indices grouped by class, ascending within each class.
    std::vector<std::vector<int>> indices_by_class() const;
};

/// Thresholding: bit i of point j is 1 iff samples[j][i] >= threshold.
BinaryDataset binarize(const RawDataset& raw, int threshold);

/// Deterministic stratified split. Each class keeps at least one point on
/// both sides; point order inside each half follows the original dataset.
std::pair<BinaryDataset, BinaryDataset> split(const BinaryDataset& data,
                                              double train_fraction,
                                              std::uint64_t seed);

} // namespace ptm
