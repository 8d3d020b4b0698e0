#pragma once

// Binary sketch container, little-endian throughout:
//
//   "TSK1" | u16 version | config block | derived parameters | u64 length
//   | u64 level count | per level: u8 present [u32 cells, (u32 index, counters)*]
//   | L0 block | u32 CRC-32 of everything before it
//
// Counters are 16-byte two's complement. Only nonzero cells are written and a
// level is present iff it holds a nonzero cell, so the encoding is canonical:
// equal sketch states give equal bytes.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tsketch/sampler.hpp"

namespace tsketch {

inline constexpr std::uint16_t kContainerVersion = 1;

/// Flushes a copy if needed; the sketch itself is not modified.
std::vector<std::uint8_t> serialize(const SamplerSketch& sketch);
/// Throws FormatError on malformed input, a CRC mismatch or parameter skew.
SamplerSketch deserialize(std::span<const std::uint8_t> bytes);

void save(const SamplerSketch& sketch, const std::filesystem::path& path);
SamplerSketch load(const std::filesystem::path& path);

} // namespace tsketch
