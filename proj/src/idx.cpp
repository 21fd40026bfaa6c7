#include "ptm/idx.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>

namespace ptm {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803u;
constexpr std::uint32_t kLabelsMagic = 0x00000801u;

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw ParseError("idx: truncated header in " + path);
    return (static_cast<std::uint32_t>(buf[0]) << 24) |
           (static_cast<std::uint32_t>(buf[1]) << 16) |
           (static_cast<std::uint32_t>(buf[2]) << 8) |
           static_cast<std::uint32_t>(buf[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {
        static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("idx: cannot open " + path);
    return in;
}

} // namespace

RawDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    auto images = open_input(images_path);
    const std::uint32_t imagic = read_be32(images, images_path);
    if (imagic != kImagesMagic)
        throw ParseError("idx: bad magic number in " + images_path +
                         " (expected image file)");
    const std::uint32_t count = read_be32(images, images_path);
    const std::uint32_t rows = read_be32(images, images_path);
    const std::uint32_t cols = read_be32(images, images_path);
    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    if (count == 0 || pixels == 0)
        throw ParseError("idx: empty image file " + images_path);

    auto labels_in = open_input(labels_path);
    const std::uint32_t lmagic = read_be32(labels_in, labels_path);
    if (lmagic != kLabelsMagic)
        throw ParseError("idx: bad magic number in " + labels_path +
                         " (expected label file)");
    const std::uint32_t label_count = read_be32(labels_in, labels_path);
    if (label_count != count)
        throw ParseError("idx: image/label count mismatch (" + std::to_string(count) +
                         " images vs " + std::to_string(label_count) + " labels)");

    RawDataset out;
    out.width = static_cast<int>(pixels);
    out.samples.reserve(count);
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < count; ++i) {
        images.read(reinterpret_cast<char*>(buf.data()),
                    static_cast<std::streamsize>(pixels));
        if (!images)
            throw ParseError("idx: truncated image payload in " + images_path);
        std::vector<int> sample(pixels);
        std::transform(buf.begin(), buf.end(), sample.begin(),
                       [](unsigned char b) { return static_cast<int>(b); });
        out.samples.push_back(std::move(sample));
    }

    out.labels.reserve(count);
    std::vector<unsigned char> lbuf(count);
    labels_in.read(reinterpret_cast<char*>(lbuf.data()),
                   static_cast<std::streamsize>(count));
    if (!labels_in)
        throw ParseError("idx: truncated label payload in " + labels_path);
    int max_label = 0;
    for (unsigned char b : lbuf) {
        out.labels.push_back(static_cast<int>(b));
        max_label = std::max(max_label, static_cast<int>(b));
    }
    out.num_classes = max_label + 1;
    out.validate();
    return out;
}

void write_idx(const std::string& images_path, const std::string& labels_path,
               const RawDataset& data, int rows, int cols) {
    data.validate();
    if (rows * cols != data.width)
        throw ContractError("write_idx: rows*cols != sample width");

    std::ofstream images(images_path, std::ios::binary);
    if (!images) throw IoError("idx: cannot write " + images_path);
    write_be32(images, kImagesMagic);
    write_be32(images, static_cast<std::uint32_t>(data.size()));
    write_be32(images, static_cast<std::uint32_t>(rows));
    write_be32(images, static_cast<std::uint32_t>(cols));
    std::vector<unsigned char> buf(static_cast<std::size_t>(data.width));
    for (const auto& sample : data.samples) {
        for (std::size_t i = 0; i < buf.size(); ++i)
            buf[i] = static_cast<unsigned char>(std::clamp(sample[i], 0, 255));
        images.write(reinterpret_cast<const char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size()));
    }
    if (!images) throw IoError("idx: write failed for " + images_path);

    std::ofstream labels(labels_path, std::ios::binary);
    if (!labels) throw IoError("idx: cannot write " + labels_path);
    write_be32(labels, kLabelsMagic);
    write_be32(labels, static_cast<std::uint32_t>(data.size()));
    for (int y : data.labels) {
        const auto b = static_cast<unsigned char>(y);
        labels.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!labels) throw IoError("idx: write failed for " + labels_path);
}

} // namespace ptm
