#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptm/errors.hpp"

namespace ptm {

/// Fixed-width bit string packed little-endian into 64-bit words: bit i
/// lives in word i/64 at position i%64. Padding bits above width() are kept
/// zero so whole-word XOR/popcount kernels need no tail masking.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(int width);

    // Parses "1010"-style strings; character at position i becomes bit i.
    static BitVector from_string(std::string_view bits);

    int width() const { return width_; }
    int word_count() const { return static_cast<int>(words_.size()); }

    bool get(int i) const {
        check_index(i);
        return (words_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u;
    }

    void set(int i, bool value) {
        check_index(i);
        const std::uint64_t mask = 1ull << (i & 63);
        if (value)
            words_[static_cast<std::size_t>(i) >> 6] |= mask;
        else
            words_[static_cast<std::size_t>(i) >> 6] &= ~mask;
    }

    std::span<const std::uint64_t> words() const { return words_; }

    int popcount() const;
    std::string to_string() const;

    bool operator==(const BitVector&) const = default;

private:
    void check_index(int i) const {
        if (i < 0 || i >= width_)
            throw ContractError("BitVector: bit index " + std::to_string(i) +
                                " out of range for width " + std::to_string(width_));
    }

    int width_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Number of differing bits: XOR then popcount over whole words.
/// Widths must match.
int hamming_distance(const BitVector& a, const BitVector& b);

} // namespace ptm
