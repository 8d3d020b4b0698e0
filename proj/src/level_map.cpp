#include "tsketch/level_map.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "tsketch/errors.hpp"

namespace tsketch {

namespace {

// Returns j if lambda == 2^-j exactly, 0 otherwise.
unsigned power_of_two_shift(double lambda) {
  int exponent = 0;
  const double mantissa = std::frexp(lambda, &exponent);
  if (mantissa != 0.5 || exponent > 0) return 0;
  return static_cast<unsigned>(1 - exponent);
}

// h * 2^shift < bound, without overflow.
bool shifted_below(u64 h, unsigned shift, u64 bound) {
  if (shift >= 64) return h == 0;
  return (static_cast<u128>(h) << shift) < bound;
}

} // namespace

std::size_t LevelMap::count_levels(double lambda, u64 hash_range) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ConfigError("lambda must be in (0, 1)");
  if (hash_range < 2) throw ConfigError("level hash range must be >= 2");
  if (const unsigned j = power_of_two_shift(lambda); j != 0) {
    std::size_t levels = 1;
    while (j * levels < 64 && (u64{1} << (j * levels)) < hash_range) ++levels;
    return levels;
  }
  const long double ratio = std::log(static_cast<long double>(hash_range)) / -std::log(static_cast<long double>(lambda));
  auto levels = static_cast<std::size_t>(std::ceil(ratio - 1e-12L));
  return levels == 0 ? 1 : levels;
}

LevelMap::LevelMap(double lambda, u64 hash_range, double alpha, HashFn hash)
    : lambda_(lambda), range_(hash_range), alpha_(alpha), hash_(std::move(hash)) {
  if (!(alpha > 1.0)) throw ConfigError("alpha must be > 1");
  if (hash_.range() != hash_range) throw ConfigError("level hash range does not match M");
  levels_ = count_levels(lambda, hash_range);
  shift_ = power_of_two_shift(lambda);
}

std::size_t LevelMap::level_of_hash(u64 hashed) const noexcept {
  if (hashed == 0) return levels_ - 1;
  if (shift_ != 0) {
    // Largest l with h * 2^(j l) < M; bounded by L-1 for h >= 1.
    std::size_t l = 0;
    const unsigned hb = static_cast<unsigned>(std::bit_width(hashed));
    const unsigned mb = static_cast<unsigned>(std::bit_width(range_));
    if (mb > hb + 1) l = (mb - hb - 1) / shift_;
    while (l > 0 && !shifted_below(hashed, shift_ * static_cast<unsigned>(l), range_)) --l;
    while (l + 1 < levels_ && shifted_below(hashed, shift_ * static_cast<unsigned>(l + 1), range_)) ++l;
    return l;
  }
  std::size_t l = 0;
  long double threshold = static_cast<long double>(range_) * lambda_;
  while (l + 1 < levels_ && static_cast<long double>(hashed) < threshold) {
    ++l;
    threshold *= lambda_;
  }
  return l;
}

std::optional<LevelChoice> LevelMap::select_level(double l0_estimate, u64 target) const noexcept {
  if (!(l0_estimate > 0.0)) return std::nullopt;
  const double base = l0_estimate * (1.0 - lambda_) / alpha_;
  const double need = 2.0 * static_cast<double>(target);
  if (base < need) return LevelChoice{0, true};
  std::size_t l = 0;
  double scaled = base * lambda_; // base * lambda^(l+1)
  while (scaled >= need) {
    ++l;
    scaled *= lambda_;
  }
  if (l >= levels_) return LevelChoice{levels_ - 1, true};
  return LevelChoice{l, false};
}

} // namespace tsketch
