#include "tsketch/bin_sketch.hpp"

namespace tsketch {

namespace {

// Shared single-element test on (X, Y, Z). With X | Y and k = Y/X the identity
// XZ = Y^2 is equivalent to Z = k*Y, which stays inside 128 bits under the
// admission bounds while X*Z might not.
CellVerdict single_or_collision(i128 x, i128 y, i128 z, u64 universe) noexcept {
  if (x == 0 || y == 0 || z == 0) return CellVerdict::collision();
  if (y % x != 0) return CellVerdict::collision();
  const i128 k = y / x;
  if (k < 1 || k >= static_cast<i128>(universe)) return CellVerdict::collision();
  if (z != k * y) return CellVerdict::collision();
  return CellVerdict::single(static_cast<u64>(k), x);
}

} // namespace

CellVerdict classify_strict(const StrictBinSketch& cell, u64 universe) noexcept {
  if (cell.x == 0) return CellVerdict::empty();
  return single_or_collision(cell.x, cell.y, cell.z, universe);
}

CellVerdict classify_nonstrict(const NonStrictBinSketch& cell, u64 universe, const HashFn& h_t) noexcept {
  if (cell.is_zero()) return CellVerdict::empty();
  CellVerdict v = single_or_collision(cell.x, cell.y, cell.z, universe);
  if (!v.is_single()) return v;
  if (cell.t != v.count * static_cast<i128>(h_t(v.value))) return CellVerdict::collision();
  return v;
}

void accumulate(StrictBinSketch& a, const StrictBinSketch& b, int sign) noexcept {
  if (sign >= 0) {
    a.x += b.x;
    a.y += b.y;
    a.z += b.z;
    a.w += b.w;
  } else {
    a.x -= b.x;
    a.y -= b.y;
    a.z -= b.z;
    a.w -= b.w;
  }
}

void accumulate(NonStrictBinSketch& a, const NonStrictBinSketch& b, int sign) noexcept {
  if (sign >= 0) {
    a.x += b.x;
    a.y += b.y;
    a.z += b.z;
    a.w += b.w;
    a.t += b.t;
  } else {
    a.x -= b.x;
    a.y -= b.y;
    a.z -= b.z;
    a.w -= b.w;
    a.t -= b.t;
  }
}

StrictBinSketch combine(const StrictBinSketch& a, const StrictBinSketch& b, int sign) noexcept {
  StrictBinSketch out = a;
  accumulate(out, b, sign);
  return out;
}

NonStrictBinSketch combine(const NonStrictBinSketch& a, const NonStrictBinSketch& b, int sign) noexcept {
  NonStrictBinSketch out = a;
  accumulate(out, b, sign);
  return out;
}

} // namespace tsketch
