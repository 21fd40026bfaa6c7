#pragma once

#include <string>

#include "ptm/dataset.hpp"

namespace ptm {

// IDX (MNIST-family) container, big-endian. Image files carry magic
// 0x00000803 and dims [count, rows, cols]; label files carry 0x00000801.

RawDataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes an image/label pair; sample values are clamped to [0, 255].
void write_idx(const std::string& images_path, const std::string& labels_path,
               const RawDataset& data, int rows, int cols);

} // namespace ptm
