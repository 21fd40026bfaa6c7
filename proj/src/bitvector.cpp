#include "ptm/bitvector.hpp"

namespace ptm {

BitVector::BitVector(int width)
    : width_(width), words_(static_cast<std::size_t>((width + 63) / 64), 0) {
    if (width < 0) throw ContractError("BitVector: negative width");
}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(static_cast<int>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const char c = bits[i];
        if (c != '0' && c != '1')
            throw ContractError("BitVector::from_string: expected '0'/'1', got '" +
                                std::string(1, c) + "'");
        if (c == '1') v.set(static_cast<int>(i), true);
    }
    return v;
}

int BitVector::popcount() const {
    int n = 0;
    for (std::uint64_t w : words_) n += std::popcount(w);
    return n;
}

std::string BitVector::to_string() const {
    std::string s(static_cast<std::size_t>(width_), '0');
    for (int i = 0; i < width_; ++i)
        if (get(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

int hamming_distance(const BitVector& a, const BitVector& b) {
    if (a.width() != b.width())
        throw ContractError("hamming_distance: width mismatch (" +
                            std::to_string(a.width()) + " vs " +
                            std::to_string(b.width()) + ")");
    const auto wa = a.words();
    const auto wb = b.words();
    int n = 0;
    for (std::size_t i = 0; i < wa.size(); ++i) n += std::popcount(wa[i] ^ wb[i]);
    return n;
}

} // namespace ptm
