#pragma once

// Mergeable estimators for L0, the number of values with a nonzero total.
//
// AmplifiedL0Estimator splits the universe over tau instances with a t-wise
// independent hash g and reports a scaled median of the instance estimates.
// Each instance is a bit-sampling array: a value falls to depth d with
// probability 2^-(d+1) and into one of 64 buckets at that depth; every bucket
// is a non-strict bin sketch, so occupancy survives arbitrary cancellations.
//
// ExactL0Counter keeps every total; it is the reference oracle.

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "tsketch/bin_sketch.hpp"
#include "tsketch/field_hash.hpp"

namespace tsketch {

class AmplifiedL0Estimator {
public:
  static constexpr std::size_t kBuckets = 64;
  static constexpr std::size_t kDepths = 32;
  /// Bits of the base hash: 6 bucket bits, 32 depth bits, 22 guard bits.
  static constexpr u64 kBaseRange = u64{1} << 60;
  static constexpr unsigned kGuardShift = 38;
  /// A depth whose occupancy exceeds this is too saturated for linear counting.
  static constexpr std::size_t kSaturated = 44;
  /// Below this median per-instance estimate the plain sum is reported instead.
  static constexpr double kSparseMedian = 32.0;

  AmplifiedL0Estimator(std::size_t instances, std::size_t independence, u64 seed, u64 universe, double alpha);

  void update(u64 k, i64 c) noexcept { update_hashed(k, c, split_(k), base_(k)); }
  /// split_value = g(k), base_value = base hash of k.
  void update_hashed(u64 k, i64 c, u64 split_value, u64 base_value) noexcept;

  double estimate() const;
  /// Raw per-instance estimates, for diagnostics and tests.
  std::vector<double> instance_estimates() const;

  /// this += sign * other; throws MergeError on different randomness.
  void merge(const AmplifiedL0Estimator& other, int sign);
  bool compatible(const AmplifiedL0Estimator& other) const noexcept;

  std::size_t instances() const noexcept { return instances_; }
  double alpha() const noexcept { return alpha_; }
  const HashFn& split_hash() const noexcept { return split_; }
  const HashFn& base_hash() const noexcept { return base_; }

  /// Cells in instance-major, depth, bucket order.
  std::span<const NonStrictBinSketch> cells() const noexcept { return cells_; }
  std::span<NonStrictBinSketch> cells() noexcept { return cells_; }

  bool operator==(const AmplifiedL0Estimator&) const = default;

private:
  double instance_estimate(std::size_t instance) const;

  std::size_t instances_;
  u64 universe_;
  double alpha_;
  HashFn split_;
  HashFn base_;
  std::vector<NonStrictBinSketch> cells_;
};

class ExactL0Counter {
public:
  void update(u64 k, i64 c);
  double estimate() const noexcept { return static_cast<double>(totals_.size()); }
  void merge(const ExactL0Counter& other, int sign);

  /// Nonzero totals only, ordered by value.
  const std::map<u64, i128>& totals() const noexcept { return totals_; }
  void set_total(u64 k, i128 total);

  bool operator==(const ExactL0Counter&) const = default;

private:
  std::map<u64, i128> totals_;
};

enum class L0Kind : std::uint8_t { Amplified = 0, Exact = 1 };

/// The estimator slot of a sampler sketch.
class L0Estimator {
public:
  explicit L0Estimator(AmplifiedL0Estimator impl) : impl_(std::move(impl)) {}
  explicit L0Estimator(ExactL0Counter impl) : impl_(std::move(impl)) {}

  L0Kind kind() const noexcept { return impl_.index() == 0 ? L0Kind::Amplified : L0Kind::Exact; }

  void update(u64 k, i64 c);
  double estimate() const;
  void merge(const L0Estimator& other, int sign);

  AmplifiedL0Estimator* amplified() noexcept { return std::get_if<AmplifiedL0Estimator>(&impl_); }
  const AmplifiedL0Estimator* amplified() const noexcept { return std::get_if<AmplifiedL0Estimator>(&impl_); }
  ExactL0Counter* exact() noexcept { return std::get_if<ExactL0Counter>(&impl_); }
  const ExactL0Counter* exact() const noexcept { return std::get_if<ExactL0Counter>(&impl_); }

  bool operator==(const L0Estimator&) const = default;

private:
  std::variant<AmplifiedL0Estimator, ExactL0Counter> impl_;
};

} // namespace tsketch
