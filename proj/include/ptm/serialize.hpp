#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ptm/tsetlin.hpp"

namespace ptm {

/// Binary model format, little-endian throughout:
///   "PTMB" | u32 version=1 | i32 classes | i32 width | i32 clauses_per_class
///   | i32 threshold | f64 specificity | i32 states | i32 epochs | u64 seed
///   | per class, per clause: i8 polarity, then i16 state per literal (2F).
/// Files are written atomically enough for our purposes (single write);
/// loading validates magic, version, header fields, and exact length.
void save_machine(const TsetlinMachine& machine, const std::filesystem::path& path);
TsetlinMachine load_machine(const std::filesystem::path& path);

/// FNV-1a 64-bit digest of a byte range / file, as 16 lowercase hex chars.
/// Used to fingerprint models and reports for determinism checks.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::filesystem::path& path);

} // namespace ptm
