#pragma once

// Bin Sketch cells. A cell keeps exact signed sums over the updates routed to
// it and can tell whether exactly one value survives:
//   X = sum c, Y = sum c*k, Z = sum c*k^2
//   W = sum c*h_other(k)   (twin-bin locator, used by the two-array structure)
//   T = sum c*h_T(k)       (non-strict variant only)
// Values live in [1, m); value 0 is not admissible because a single survivor
// at 0 would leave Y = Z = 0.

#include <cstdint>

#include "tsketch/field_hash.hpp"

namespace tsketch {

enum class VerdictKind : std::uint8_t { Empty, Single, Collision };

struct CellVerdict {
  VerdictKind kind = VerdictKind::Empty;
  u64 value = 0; // valid for Single
  i128 count = 0; // valid for Single, never 0

  static CellVerdict empty() noexcept { return {}; }
  static CellVerdict collision() noexcept { return {VerdictKind::Collision, 0, 0}; }
  static CellVerdict single(u64 k, i128 c) noexcept { return {VerdictKind::Single, k, c}; }

  bool is_single() const noexcept { return kind == VerdictKind::Single; }
  bool operator==(const CellVerdict&) const = default;
};

struct StrictBinSketch {
  i128 x = 0;
  i128 y = 0;
  i128 z = 0;
  i128 w = 0;

  void insert(u64 k, i64 c) noexcept {
    const i128 ck = static_cast<i128>(c) * static_cast<i128>(k);
    x += c;
    y += ck;
    z += ck * static_cast<i128>(k);
  }
  void insert(u64 k, i64 c, u64 other_bin) noexcept {
    insert(k, c);
    w += static_cast<i128>(c) * static_cast<i128>(other_bin);
  }

  bool is_zero() const noexcept { return x == 0 && y == 0 && z == 0 && w == 0; }
  bool operator==(const StrictBinSketch&) const = default;
};

struct NonStrictBinSketch {
  i128 x = 0;
  i128 y = 0;
  i128 z = 0;
  i128 w = 0;
  i128 t = 0;

  /// hashed_value = h_T(k) from the structure's shared h_T.
  void insert(u64 k, i64 c, u64 hashed_value) noexcept {
    const i128 ck = static_cast<i128>(c) * static_cast<i128>(k);
    x += c;
    y += ck;
    z += ck * static_cast<i128>(k);
    t += static_cast<i128>(c) * static_cast<i128>(hashed_value);
  }
  void insert(u64 k, i64 c, u64 hashed_value, u64 other_bin) noexcept {
    insert(k, c, hashed_value);
    w += static_cast<i128>(c) * static_cast<i128>(other_bin);
  }

  bool is_zero() const noexcept { return x == 0 && y == 0 && z == 0 && w == 0 && t == 0; }
  bool operator==(const NonStrictBinSketch&) const = default;
};

/// Empty iff X = 0; Single(Y/X, X) iff X, Y, Z != 0, X | Y, Y/X in [1, m) and
/// XZ = Y^2; otherwise Collision. Only sound on strict content.
CellVerdict classify_strict(const StrictBinSketch& cell, u64 universe) noexcept;

/// Same algebra plus the guard T = X * h_T(Y/X). Empty needs every counter zero.
CellVerdict classify_nonstrict(const NonStrictBinSketch& cell, u64 universe, const HashFn& h_t) noexcept;

/// Counter-wise a + sign*b, sign in {+1, -1}.
StrictBinSketch combine(const StrictBinSketch& a, const StrictBinSketch& b, int sign) noexcept;
NonStrictBinSketch combine(const NonStrictBinSketch& a, const NonStrictBinSketch& b, int sign) noexcept;

/// In-place a += sign*b; used by the structures' merge loops.
void accumulate(StrictBinSketch& a, const StrictBinSketch& b, int sign) noexcept;
void accumulate(NonStrictBinSketch& a, const NonStrictBinSketch& b, int sign) noexcept;

} // namespace tsketch
