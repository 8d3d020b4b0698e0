#pragma once

// Two-array recovery structure with queue-driven peeling. Each value lands in
// one bin per array (t-wise independent hashes h1, h2); every bin keeps the W
// counter, so a peeled value's twin bin is read off as W / C without touching
// a hash function. Values caught in a fail set (each colliding in both bins
// with other fail-set members) stay behind.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tsketch/bin_sketch.hpp"
#include "tsketch/field_hash.hpp"
#include "tsketch/types.hpp"

namespace tsketch {

struct EfrsParams {
  StreamModel mode = StreamModel::Strict;
  std::size_t array_size = 2;
  std::size_t independence = 32;
  /// Range q of the guard hash h_T (non-strict only).
  u64 guard_range = 0;
  u64 universe = 2;

  /// s = 4C, t = max(32, ceil(2 log2(C/delta))) rounded up to even, q = ceil(4C/delta).
  static EfrsParams for_capacity(StreamModel mode, u64 capacity, double delta, u64 universe);

  bool operator==(const EfrsParams&) const = default;
};

class EfrsLayout {
public:
  EfrsLayout(EfrsParams params, u64 seed);
  /// Explicit hashes; `guard` is required iff the mode is non-strict.
  EfrsLayout(EfrsParams params, HashFn h1, HashFn h2, std::optional<HashFn> guard);

  const EfrsParams& params() const noexcept { return params_; }
  const HashFn& hash(std::size_t array) const noexcept { return array == 0 ? h1_ : h2_; }
  const HashFn& guard() const noexcept { return guard_; }
  bool non_strict() const noexcept { return params_.mode == StreamModel::NonStrict; }

  bool operator==(const EfrsLayout&) const = default;

private:
  void check() const;

  EfrsParams params_;
  HashFn h1_;
  HashFn h2_;
  HashFn guard_; // unused (default) in strict mode
};

struct EfrsRecovery {
  std::vector<SampleEntry> entries; // ordered by value
  /// Bins still nonzero after peeling: the footprint of the fail sets.
  std::size_t residual_bins = 0;
  /// Singles whose W counter did not yield a valid twin bin.
  std::size_t flagged_bins = 0;
  /// Values extracted more than once (possible only on false singles).
  std::size_t duplicates = 0;
  /// Dequeue operations performed.
  std::size_t queue_ops = 0;
};

class Efrs {
public:
  explicit Efrs(std::shared_ptr<const EfrsLayout> layout);

  void insert(u64 k, i64 c) noexcept;
  /// Insert with precomputed bins b1 = h1(k), b2 = h2(k) and guard value h_T(k)
  /// (ignored in strict mode).
  void insert_hashed(u64 k, i64 c, u64 b1, u64 b2, u64 guard_value) noexcept;

  EfrsRecovery recover() const;

  void merge(const Efrs& other, int sign);

  const EfrsLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const EfrsLayout>& layout_ptr() const noexcept { return layout_; }
  std::size_t array_size() const noexcept { return layout_->params().array_size; }

  /// Exactly one of these is populated, by mode. Bin (a, b) is index a*s + b.
  std::span<const StrictBinSketch> strict_cells() const noexcept { return strict_; }
  std::span<StrictBinSketch> strict_cells() noexcept { return strict_; }
  std::span<const NonStrictBinSketch> nonstrict_cells() const noexcept { return nonstrict_; }
  std::span<NonStrictBinSketch> nonstrict_cells() noexcept { return nonstrict_; }

  /// Verdict for bin b of array a under the mode's classifier.
  CellVerdict classify(std::size_t array, std::size_t bin) const noexcept;
  /// W counter of bin b of array a.
  i128 locator(std::size_t array, std::size_t bin) const noexcept;
  bool is_zero() const noexcept;

  bool operator==(const Efrs& o) const {
    return *layout_ == *o.layout_ && strict_ == o.strict_ && nonstrict_ == o.nonstrict_;
  }

private:
  template <class Cell>
  EfrsRecovery peel(std::vector<Cell> work) const;

  std::shared_ptr<const EfrsLayout> layout_;
  std::vector<StrictBinSketch> strict_;
  std::vector<NonStrictBinSketch> nonstrict_;
};

} // namespace tsketch
