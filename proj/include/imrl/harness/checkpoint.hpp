#pragma once

#include "imrl/core/archive.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace imrl::harness {

/// Layout:
///   bytes 0..7    magic "IMRLCKPT"
///   bytes 8..11   format version, uint32 little-endian
///   bytes 12..15  metadata length N, uint32 little-endian
///   N bytes       UTF-8 JSON: {"meta": ..., "arrays": [{name, rows, cols, offset}, ...]}
///   payload       every array, column-major little-endian float64, in manifest order
///   4 bytes       CRC-32 of all preceding bytes, uint32 little-endian
inline constexpr char kCheckpointMagic[8] = {'I', 'M', 'R', 'L', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const Archive& archive);
/// Throws CheckpointError on a bad magic, version mismatch, truncation,
/// checksum failure or inconsistent manifest.
Archive decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path, const Archive& archive);
Archive read_checkpoint(const std::filesystem::path& path);

}  // namespace imrl::harness
