#include "ptm/serialize.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "ptm/errors.hpp"

namespace ptm {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    void raw(const void* data, std::size_t size) {
        const auto* p = static_cast<const char*>(data);
        bytes_.insert(bytes_.end(), p, p + size);
    }
    void u32(std::uint32_t v) { little(v); }
    void u64(std::uint64_t v) { little(v); }
    void i32(std::int32_t v) { little(static_cast<std::uint32_t>(v)); }
    void i16(std::int16_t v) { little(static_cast<std::uint16_t>(v)); }
    void i8(std::int8_t v) { bytes_.push_back(static_cast<char>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    template <typename T>
    void little(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    std::vector<char> bytes_;
};

class Reader {
public:
    Reader(const std::vector<char>& bytes, std::string name)
        : bytes_(bytes), name_(std::move(name)) {}

    void raw(void* out, std::size_t size) {
        if (pos_ + size > bytes_.size())
            throw ParseError(name_ + ": truncated model file");
        std::memcpy(out, bytes_.data() + pos_, size);
        pos_ += size;
    }
    std::uint32_t u32() { return little<std::uint32_t>(); }
    std::uint64_t u64() { return little<std::uint64_t>(); }
    std::int32_t i32() { return static_cast<std::int32_t>(little<std::uint32_t>()); }
    std::int16_t i16() { return static_cast<std::int16_t>(little<std::uint16_t>()); }
    std::int8_t i8() {
        if (pos_ >= bytes_.size()) throw ParseError(name_ + ": truncated model file");
        return static_cast<std::int8_t>(bytes_[pos_++]);
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    bool exhausted() const { return pos_ == bytes_.size(); }
    const std::string& name() const { return name_; }

private:
    template <typename T>
    T little() {
        if (pos_ + sizeof(T) > bytes_.size())
            throw ParseError(name_ + ": truncated model file");
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }

    const std::vector<char>& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading " + path.string());
    return bytes;
}

} // namespace

void save_machine(const TsetlinMachine& machine, const std::filesystem::path& path) {
    const TmParams& p = machine.params();
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.i32(machine.num_classes());
    w.i32(machine.width());
    w.i32(p.clauses_per_class);
    w.i32(p.threshold);
    w.f64(p.specificity);
    w.i32(p.states);
    w.i32(p.epochs);
    w.u64(p.seed);
    for (int c = 0; c < machine.num_classes(); ++c) {
        for (int j = 0; j < p.clauses_per_class; ++j) {
            const Clause& cl = machine.clause(c, j);
            w.i8(static_cast<std::int8_t>(cl.polarity()));
            for (int l = 0; l < cl.num_literals(); ++l)
                w.i16(static_cast<std::int16_t>(cl.state(l)));
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

TsetlinMachine load_machine(const std::filesystem::path& path) {
    const std::vector<char> bytes = read_file(path);
    Reader r(bytes, path.string());

    char magic[4];
    r.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw ParseError(path.string() + ": bad magic, not a model file");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw ParseError(path.string() + ": unsupported model version " +
                         std::to_string(version));

    const int classes = r.i32();
    const int width = r.i32();
    TmParams params;
    params.clauses_per_class = r.i32();
    params.threshold = r.i32();
    params.specificity = r.f64();
    params.states = r.i32();
    params.epochs = r.i32();
    params.seed = r.u64();
    try {
        params.validate();
        if (classes < 2 || width < 1)
            throw ConfigError("model header shape out of range");
    } catch (const ConfigError& e) {
        throw ParseError(path.string() + ": invalid model header (" +
                         std::string(e.what()) + ")");
    }

    TsetlinMachine machine(classes, width, params);
    for (int c = 0; c < classes; ++c) {
        for (int j = 0; j < params.clauses_per_class; ++j) {
            Clause& cl = machine.clause_mut(c, j);
            const int polarity = r.i8();
            if (polarity != cl.polarity())
                throw ParseError(path.string() + ": clause polarity layout mismatch");
            for (int l = 0; l < cl.num_literals(); ++l) {
                const int value = r.i16();
                if (value < 1 || value > params.states)
                    throw ParseError(path.string() + ": automaton state out of range");
                cl.set_state(l, value);
            }
        }
    }
    if (!r.exhausted())
        throw ParseError(path.string() + ": trailing bytes after model data");
    return machine;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::filesystem::path& path) {
    const std::vector<char> bytes = read_file(path);
    const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
    std::string hex(16, '0');
    static const char* digits = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) hex[15 - i] = digits[(h >> (4 * i)) & 0xf];
    return hex;
}

} // namespace ptm
