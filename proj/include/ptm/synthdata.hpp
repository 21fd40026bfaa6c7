#pragma once

#include <cstdint>

#include "ptm/dataset.hpp"

namespace ptm {

constexpr int kSyntheticRows = 28;
constexpr int kSyntheticCols = 28;
constexpr int kSyntheticClasses = 10;

/// Deterministic synthetic grayscale corpus with handwritten-digit geometry:
/// 28x28 uint8-range images, 10 classes, and `modes` "writing styles" per
/// class so every class is multi-modal in Hamming space once thresholded.
///
/// Each mode is a fixed random ink mask. Inked pixels draw intensity
/// uniformly from [160, 255], background pixels from [0, 70], and a handful
/// of pixels per sample swap bands ("smudges"). Any binarization threshold
/// in (70, 160] therefore recovers `modes` tight Hamming balls per class,
/// far apart from each other — the regime the pre-sorting pipeline targets.
/// Splitting a class across K machines is only structurally sound when it
/// has at least K modes, so pick modes >= the largest ensemble size under
/// study.
///
/// `noise` is the number of smudged pixels per sample; it sets the Hamming
/// radius of each ball (and so task difficulty). It must stay well below
/// half the ~357-bit expected mask separation or the balls merge.
///
/// Identical (per_class, seed, modes, noise) produce identical datasets.
/// Sample order interleaves classes (0,1,...,9,0,1,...), so every prefix is
/// nearly class-balanced.
RawDataset synthetic_images(int per_class, std::uint64_t seed, int modes = 4,
                            int noise = 128);

} // namespace ptm
