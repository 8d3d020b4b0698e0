#pragma once

// Full Recovery Structure: tau arrays of s bins, one strict bin sketch per
// bin, each array addressed by its own pairwise independent hash. A value is
// added to one bin in every array. The hash set (the layout) is shared by the
// structures of every level.

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tsketch/bin_sketch.hpp"
#include "tsketch/field_hash.hpp"
#include "tsketch/types.hpp"

namespace tsketch {

struct FrsParams {
  StreamModel mode = StreamModel::Strict;
  std::size_t arrays = 1;
  std::size_t array_size = 2;
  /// Non-strict recovery draws candidates from the first `candidate_arrays`
  /// arrays and lets the remaining ones vote.
  std::size_t candidate_arrays = 0;
  u64 universe = 2;

  /// Strict: ceil(log2(C/delta)) arrays of 2C bins.
  /// Non-strict: ceil(5 log2(C/delta)) arrays of 8C bins, the first
  /// ceil(log2(C/delta)) of them proposing candidates.
  static FrsParams for_capacity(StreamModel mode, u64 capacity, double delta, u64 universe);

  bool operator==(const FrsParams&) const = default;
};

class FrsLayout {
public:
  FrsLayout(FrsParams params, u64 seed);
  /// Explicit hashes, for constructed test instances. Ranges must equal array_size.
  FrsLayout(FrsParams params, std::vector<HashFn> hashes);

  const FrsParams& params() const noexcept { return params_; }
  std::span<const HashFn> hashes() const noexcept { return hashes_; }

  std::size_t bin(std::size_t array, u64 k) const noexcept {
    const auto& c = pair_[array];
    return static_cast<std::size_t>(field::add(field::mul(c[1], k), c[0]) % params_.array_size);
  }

  bool operator==(const FrsLayout& o) const { return params_ == o.params_ && hashes_ == o.hashes_; }

private:
  void init();

  FrsParams params_;
  std::vector<HashFn> hashes_;
  std::vector<std::array<u64, 2>> pair_; // (c0, c1) of each pairwise hash
};

class Frs {
public:
  explicit Frs(std::shared_ptr<const FrsLayout> layout);

  void insert(u64 k, i64 c) noexcept;

  /// Peels singles until none remain, then checks every bin is zero.
  /// nullopt signals a recovery failure; the structure itself is untouched.
  std::optional<std::vector<SampleEntry>> recover_strict() const;

  /// Candidate extraction plus majority vote over the remaining arrays.
  std::vector<SampleEntry> recover_nonstrict() const;

  /// Dispatches on the layout's mode; non-strict never fails.
  std::optional<std::vector<SampleEntry>> recover() const;

  void merge(const Frs& other, int sign);

  const FrsLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const FrsLayout>& layout_ptr() const noexcept { return layout_; }
  std::span<const StrictBinSketch> cells() const noexcept { return cells_; }
  std::span<StrictBinSketch> cells() noexcept { return cells_; }
  const StrictBinSketch& cell(std::size_t array, std::size_t bin) const noexcept {
    return cells_[array * layout_->params().array_size + bin];
  }
  bool is_zero() const noexcept;

  bool operator==(const Frs& o) const { return *layout_ == *o.layout_ && cells_ == o.cells_; }

private:
  std::shared_ptr<const FrsLayout> layout_;
  std::vector<StrictBinSketch> cells_;
};

} // namespace tsketch
