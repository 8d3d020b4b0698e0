#pragma once

// Seeded t-wise independent hash functions: random polynomials of degree t-1
// over GF(2^61 - 1), reduced to an output range by a final `mod R`.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tsketch {

using u64 = std::uint64_t;
using i64 = std::int64_t;
__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

namespace field {

/// Mersenne prime 2^61 - 1. Larger than every universe, hash range and level
/// range the library admits.
inline constexpr u64 kPrime = (u64{1} << 61) - 1;

constexpr u64 reduce(u128 x) noexcept {
  // x < 2^122: one fold gives r < 2^62, a second fold and subtraction finish.
  u64 r = static_cast<u64>(x & kPrime) + static_cast<u64>(x >> 61);
  r = (r & kPrime) + (r >> 61);
  return r >= kPrime ? r - kPrime : r;
}

/// Any 128-bit value, e.g. a lazy sum of up to 64 reduced products.
constexpr u64 reduce_wide(u128 x) noexcept {
  const u128 folded = (x & kPrime) + (x >> 61); // < 2^68
  return reduce(folded);
}

constexpr u64 add(u64 a, u64 b) noexcept {
  u64 r = a + b;
  return r >= kPrime ? r - kPrime : r;
}

constexpr u64 sub(u64 a, u64 b) noexcept { return a >= b ? a - b : a + kPrime - b; }

constexpr u64 mul(u64 a, u64 b) noexcept { return reduce(static_cast<u128>(a) * b); }

constexpr u64 neg(u64 a) noexcept { return a == 0 ? 0 : kPrime - a; }

u64 pow(u64 base, u64 exp) noexcept;
u64 inv(u64 a); // throws ContractError on a == 0

} // namespace field

/// SplitMix64 stream: state advances by the golden-ratio increment and each
/// output is the standard avalanche finalizer of the state. Platform independent.
class SplitMix64 {
public:
  explicit SplitMix64(u64 seed) noexcept : state_(seed) {}
  u64 next() noexcept;

  static u64 mix(u64 z) noexcept;

private:
  u64 state_;
};

/// Derives an independent-looking sub-seed for (domain, index) from a master seed.
u64 derive_seed(u64 master, u64 domain, u64 index = 0) noexcept;

/// Degree-(t-1) polynomial over GF(p) followed by `mod range`.
class HashFn {
public:
  HashFn() = default;
  /// Takes explicit coefficients (lowest degree first); each must be < p.
  HashFn(std::vector<u64> coefficients, u64 range, u64 seed = 0);

  /// poly(x) mod p mod range, by Horner's rule. Requires x < p.
  u64 operator()(u64 x) const noexcept { return field_value(x) % range_; }
  u64 eval(u64 x) const noexcept { return (*this)(x); }

  /// poly(x) mod p, before range reduction.
  u64 field_value(u64 x) const noexcept {
    u64 acc = 0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
      acc = field::add(field::mul(acc, x), *it);
    }
    return acc;
  }

  std::span<const u64> coefficients() const noexcept { return coefficients_; }
  std::size_t independence() const noexcept { return coefficients_.size(); }
  u64 range() const noexcept { return range_; }
  u64 seed() const noexcept { return seed_; }

  bool operator==(const HashFn&) const = default;

private:
  std::vector<u64> coefficients_;
  u64 range_ = 1;
  u64 seed_ = 0;
};

/// Draws t coefficients uniformly from [0, p) out of SplitMix64(seed).
/// Throws ConfigError unless 1 <= t < p and 1 <= range < p.
HashFn make_hash(u64 seed, std::size_t t, u64 range);

/// Evaluates any number of polynomials on a fixed batch of points, either by
/// remaindering down a subproduct tree or by interleaved Horner. With
/// classical remaindering the tree costs O(t^2) per batch like Horner but with
/// larger constants, so Auto picks Horner below kTreeCrossover points.
class MultipointEvaluator {
public:
  enum class Strategy : std::uint8_t { Auto, Tree, Horner };

  /// Batches smaller than this always use Horner.
  static constexpr std::size_t kHornerCutoff = 16;
  /// Auto uses the tree from this batch size on.
  static constexpr std::size_t kTreeCrossover = 8192;

  MultipointEvaluator() = default;
  /// Points must be < p; throws ContractError otherwise.
  explicit MultipointEvaluator(std::span<const u64> xs, Strategy strategy = Strategy::Auto);

  bool uses_tree() const noexcept { return root_ >= 0; }
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const u64> points() const noexcept { return points_; }

  /// out[i] = h(xs[i]). Requires |xs| <= h.independence() and |out| == |xs|.
  void evaluate(const HashFn& h, std::span<u64> out) const;
  std::vector<u64> evaluate(const HashFn& h) const;

private:
  struct Node {
    std::vector<u64> poly; // monic, lowest degree first
    std::size_t begin = 0, end = 0; // point range covered
    int left = -1, right = -1;
  };

  void descend(int node, std::vector<u64> rem, std::span<u64> out) const;

  std::vector<u64> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// out[i] = h(xs[i]) through a one-shot MultipointEvaluator; |xs| <= t.
std::vector<u64> multipoint_eval(const HashFn& h, std::span<const u64> xs,
                                 MultipointEvaluator::Strategy strategy = MultipointEvaluator::Strategy::Auto);

/// Horner over a batch, coefficient-major so the per-point chains interleave.
void horner_batch(std::span<const u64> coefficients, std::span<const u64> xs, std::span<u64> out) noexcept;

} // namespace tsketch
