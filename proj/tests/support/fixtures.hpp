// Shared test fixtures: temporary directories, random bit vectors, and small
// synthetic datasets with controllable cluster structure.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ptm/bitvector.hpp"
#include "ptm/dataset.hpp"
#include "ptm/rand.hpp"

namespace fixtures {

// RAII temporary directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "ptm_test_XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline ptm::BitVector random_bitvector(int width, ptm::Rng& rng) {
    ptm::BitVector v(width);
    for (int i = 0; i < width; ++i)
        if (rng() & 1u) v.set(i, true);
    return v;
}

// Flips `flips` distinct bits of `center`.
inline ptm::BitVector perturb(const ptm::BitVector& center, int flips, ptm::Rng& rng) {
    ptm::BitVector v = center;
    const auto chosen = ptm::sample_distinct(rng, v.width(), flips);
    for (int i : chosen) v.set(i, !v.get(i));
    return v;
}

// Dataset of `classes` Hamming balls: one random center per class, points are
// the center with up to `noise_flips` bits flipped. Centers are far apart in
// expectation (width/2), points stay within a tight ball, so the clusters are
// well separated and clustering/learning behaviour is predictable.
inline ptm::BinaryDataset hamming_ball_dataset(int classes, int per_class, int width,
                                               int noise_flips, std::uint64_t seed) {
    ptm::Rng rng(seed);
    ptm::BinaryDataset data;
    data.width = width;
    data.num_classes = classes;
    std::vector<ptm::BitVector> centers;
    centers.reserve(static_cast<std::size_t>(classes));
    for (int c = 0; c < classes; ++c) centers.push_back(random_bitvector(width, rng));
    for (int c = 0; c < classes; ++c) {
        for (int j = 0; j < per_class; ++j) {
            const int flips = static_cast<int>(ptm::rand_below(rng, static_cast<std::uint64_t>(noise_flips + 1)));
            data.points.push_back(perturb(centers[static_cast<std::size_t>(c)], flips, rng));
            data.labels.push_back(c);
        }
    }
    data.validate();
    return data;
}

// Raw (integer-valued) dataset counterpart used for ingestion tests.
inline ptm::RawDataset raw_grayscale_dataset(int classes, int per_class, int width,
                                             std::uint64_t seed) {
    ptm::Rng rng(seed);
    ptm::RawDataset data;
    data.width = width;
    data.num_classes = classes;
    for (int c = 0; c < classes; ++c) {
        for (int j = 0; j < per_class; ++j) {
            std::vector<int> sample(static_cast<std::size_t>(width));
            for (int i = 0; i < width; ++i)
                sample[static_cast<std::size_t>(i)] =
                    static_cast<int>(ptm::rand_below(rng, 256));
            data.samples.push_back(std::move(sample));
            data.labels.push_back(c);
        }
    }
    data.validate();
    return data;
}

// Every class consists of two well-separated Hamming balls ("modes"). All
// 2*classes mode centers are pairwise at least width/3 apart (rejection
// sampled, deterministic per seed), so nearest-center scans recover a
// point's mode unambiguously when noise_flips is small.
struct TwoModeData {
    ptm::BinaryDataset data;
    std::vector<std::vector<ptm::BitVector>> centers; // [class][mode]

    // Which of the class's two balls a pattern belongs to.
    int mode_of(int class_index, const ptm::BitVector& point) const {
        const auto& pair = centers[static_cast<std::size_t>(class_index)];
        return ptm::hamming_distance(pair[0], point) <=
                       ptm::hamming_distance(pair[1], point)
                   ? 0
                   : 1;
    }
};

inline TwoModeData two_mode_dataset(int classes, int per_mode, int width,
                                    int noise_flips, std::uint64_t seed) {
    ptm::Rng rng(seed);
    std::vector<ptm::BitVector> flat;
    const int needed = 2 * classes;
    int attempts = 0;
    while (static_cast<int>(flat.size()) < needed) {
        if (++attempts > 1000 * needed)
            throw std::runtime_error("two_mode_dataset: center sampling stalled");
        ptm::BitVector candidate = random_bitvector(width, rng);
        bool far_enough = true;
        for (const auto& c : flat)
            if (ptm::hamming_distance(c, candidate) < width / 3) {
                far_enough = false;
                break;
            }
        if (far_enough) flat.push_back(std::move(candidate));
    }

    TwoModeData result;
    result.data.width = width;
    result.data.num_classes = classes;
    for (int c = 0; c < classes; ++c)
        result.centers.push_back({flat[static_cast<std::size_t>(2 * c)],
                                  flat[static_cast<std::size_t>(2 * c + 1)]});
    for (int c = 0; c < classes; ++c) {
        for (int mode = 0; mode < 2; ++mode) {
            for (int j = 0; j < per_mode; ++j) {
                const int flips =
                    static_cast<int>(ptm::rand_below(rng, static_cast<std::uint64_t>(noise_flips + 1)));
                result.data.points.push_back(perturb(
                    result.centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(mode)],
                    flips, rng));
                result.data.labels.push_back(c);
            }
        }
    }
    result.data.validate();
    return result;
}

} // namespace fixtures
