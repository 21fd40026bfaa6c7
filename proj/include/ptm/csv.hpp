#pragma once

#include <string>

#include "ptm/dataset.hpp"

namespace ptm {

// Plain-text datasets: header row, then one "label,f0,f1,..." row per sample.

RawDataset load_csv(const std::string& path);
void write_csv(const std::string& path, const RawDataset& data);

} // namespace ptm
