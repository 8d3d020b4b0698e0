#pragma once

#include <cstdint>

#include "tsketch/field_hash.hpp"

namespace tsketch {

/// Strict: running totals never go negative. NonStrict: anything goes.
enum class StreamModel : std::uint8_t { Strict = 0, NonStrict = 1 };

/// One stream pair.
struct Update {
  u64 value = 0;
  i64 count = 0;

  bool operator==(const Update&) const = default;
};

/// A recovered value with its exact total.
struct SampleEntry {
  u64 value = 0;
  i128 count = 0;

  bool operator==(const SampleEntry&) const = default;
  auto operator<=>(const SampleEntry& o) const noexcept { return value <=> o.value; }
};

const char* to_string(StreamModel model) noexcept;

} // namespace tsketch
