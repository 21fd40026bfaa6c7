#include "ptm/synthdata.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include "ptm/errors.hpp"
#include "ptm/rand.hpp"

namespace ptm {

namespace {

constexpr int kWidth = kSyntheticRows * kSyntheticCols;
constexpr int kInkFloor = 160;   // inked intensity range [160, 255]
constexpr int kBackCeil = 70;    // background intensity range [0, 70]

int ink_value(Rng& rng) { return kInkFloor + rand_index(rng, 256 - kInkFloor); }
int back_value(Rng& rng) { return rand_index(rng, kBackCeil + 1); }

} // namespace

RawDataset synthetic_images(int per_class, std::uint64_t seed, int modes, int noise) {
    if (per_class < 1) throw ConfigError("synthetic_images: per_class must be >= 1");
    if (modes < 1) throw ConfigError("synthetic_images: modes must be >= 1");
    if (noise < 0 || noise > kWidth / 4)
        throw ConfigError("synthetic_images: noise must be in [0, " + std::to_string(kWidth / 4) + "]");

    // Fixed ink masks, one per (class, mode). Independent Bernoulli(0.35)
    // pixels put any two masks ~357 bits apart in expectation, far beyond the
    // <= 2 * noise within-mode spread.
    Rng mask_rng(derive_seed(seed, SeedDomain::Data, 0));
    std::vector<std::vector<bool>> masks;
    masks.reserve(static_cast<std::size_t>(kSyntheticClasses) * modes);
    for (int m = 0; m < kSyntheticClasses * modes; ++m) {
        std::vector<bool> mask(kWidth);
        for (int p = 0; p < kWidth; ++p) mask[p] = rand_index(mask_rng, 100) < 35;
        masks.push_back(std::move(mask));
    }

    Rng sample_rng(derive_seed(seed, SeedDomain::Data, 1));
    RawDataset data;
    data.num_classes = kSyntheticClasses;
    data.width = kWidth;
    data.samples.reserve(static_cast<std::size_t>(per_class) * kSyntheticClasses);
    data.labels.reserve(data.samples.capacity());

    for (int i = 0; i < per_class * kSyntheticClasses; ++i) {
        const int label = i % kSyntheticClasses;
        const int mode = rand_index(sample_rng, modes);
        const auto& mask = masks[static_cast<std::size_t>(label * modes + mode)];

        std::vector<int> img(kWidth);
        for (int p = 0; p < kWidth; ++p)
            img[p] = mask[p] ? ink_value(sample_rng) : back_value(sample_rng);
        for (int p : sample_distinct(sample_rng, kWidth, noise))
            img[p] = mask[p] ? back_value(sample_rng) : ink_value(sample_rng);

        data.samples.push_back(std::move(img));
        data.labels.push_back(label);
    }
    data.validate();
    return data;
}

} // namespace ptm
