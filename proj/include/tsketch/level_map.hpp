#pragma once

#include <cstddef>
#include <optional>

#include "tsketch/field_hash.hpp"

namespace tsketch {

struct LevelChoice {
  std::size_t level = 0;
  /// True when no level satisfied the selection inequality and the result was
  /// clamped into [0, L-1].
  bool clamped = false;

  bool operator==(const LevelChoice&) const = default;
};

/// Geometric subsampling: a value x with hash h(x) in [0, M) lives on level l
/// iff floor(h(x) / (lambda^l M)) == 0 and floor(h(x) / (lambda^(l+1) M)) != 0.
/// Level l therefore receives a lambda^l (1 - lambda) fraction of the values.
/// h(x) = 0 is assigned to the deepest level.
class LevelMap {
public:
  LevelMap(double lambda, u64 hash_range, double alpha, HashFn hash);

  std::size_t level_count() const noexcept { return levels_; }
  double lambda() const noexcept { return lambda_; }
  double alpha() const noexcept { return alpha_; }
  u64 hash_range() const noexcept { return range_; }
  const HashFn& hash() const noexcept { return hash_; }

  std::size_t level_of(u64 x) const noexcept { return level_of_hash(hash_(x)); }
  /// Level for a precomputed h(x) in [0, M).
  std::size_t level_of_hash(u64 hashed) const noexcept;

  /// Picks l* with (1/a) E lambda^(l*+1) (1-lambda) < 2K <= (1/a) E lambda^l* (1-lambda),
  /// E being the distinct-count estimate. Returns nullopt for E == 0.
  std::optional<LevelChoice> select_level(double l0_estimate, u64 target) const noexcept;

  /// ceil(log_{1/lambda} M), computed exactly when lambda is a power of two.
  static std::size_t count_levels(double lambda, u64 hash_range);

private:
  double lambda_;
  u64 range_;
  double alpha_;
  HashFn hash_;
  std::size_t levels_;
  unsigned shift_ = 0; // lambda == 2^-shift_, or 0 for the generic path
};

} // namespace tsketch
