#include "ptm/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ptm {

namespace {

int parse_int(const std::string& field, const std::string& path, int line_no) {
    int value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError("csv: non-integer field '" + field + "' at " + path + ":" +
                         std::to_string(line_no));
    return value;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

RawDataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError("csv: missing header row in " + path);

    RawDataset out;
    int line_no = 1;
    int max_label = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.size() < 2)
            throw ParseError("csv: expected label plus features at " + path + ":" +
                             std::to_string(line_no));
        const int label = parse_int(fields[0], path, line_no);
        if (label < 0)
            throw ParseError("csv: negative label at " + path + ":" +
                             std::to_string(line_no));
        std::vector<int> sample(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i)
            sample[i - 1] = parse_int(fields[i], path, line_no);
        if (out.width == 0) out.width = static_cast<int>(sample.size());
        if (static_cast<int>(sample.size()) != out.width)
            throw ParseError("csv: ragged row at " + path + ":" + std::to_string(line_no));
        max_label = std::max(max_label, label);
        out.labels.push_back(label);
        out.samples.push_back(std::move(sample));
    }
    if (out.samples.empty()) throw ParseError("csv: no data rows in " + path);
    out.num_classes = max_label + 1;
    out.validate();
    return out;
}

void write_csv(const std::string& path, const RawDataset& data) {
    data.validate();
    std::ofstream out(path);
    if (!out) throw IoError("csv: cannot write " + path);
    out << "label";
    for (int i = 0; i < data.width; ++i) out << ",f" << i;
    out << "\n";
    for (int j = 0; j < data.size(); ++j) {
        out << data.labels[static_cast<std::size_t>(j)];
        for (int v : data.samples[static_cast<std::size_t>(j)]) out << ',' << v;
        out << "\n";
    }
    if (!out) throw IoError("csv: write failed for " + path);
}

} // namespace ptm
