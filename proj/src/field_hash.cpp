#include "tsketch/field_hash.hpp"

#include <string>

#include "tsketch/errors.hpp"
#include "tsketch/poly.hpp"

namespace tsketch {

namespace field {

u64 pow(u64 base, u64 exp) noexcept {
  u64 result = 1;
  while (exp != 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

u64 inv(u64 a) {
  if (a % kPrime == 0) throw ContractError("field::inv: zero has no inverse");
  return pow(a, kPrime - 2);
}

} // namespace field

u64 SplitMix64::mix(u64 z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

u64 SplitMix64::next() noexcept {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix(state_);
}

u64 derive_seed(u64 master, u64 domain, u64 index) noexcept {
  return SplitMix64::mix(master ^ SplitMix64::mix((domain << 48) ^ (index + 0x9E3779B97F4A7C15ULL)));
}

HashFn::HashFn(std::vector<u64> coefficients, u64 range, u64 seed)
    : coefficients_(std::move(coefficients)), range_(range), seed_(seed) {
  if (coefficients_.empty()) throw ConfigError("HashFn: need at least one coefficient");
  if (range_ == 0 || range_ >= field::kPrime) throw ConfigError("HashFn: range must be in [1, p)");
  for (u64 c : coefficients_) {
    if (c >= field::kPrime) throw ConfigError("HashFn: coefficient not reduced mod p");
  }
}

HashFn make_hash(u64 seed, std::size_t t, u64 range) {
  if (t == 0 || t >= field::kPrime) {
    throw ConfigError("make_hash: independence t=" + std::to_string(t) + " out of range");
  }
  if (range == 0 || range >= field::kPrime) {
    throw ConfigError("make_hash: range " + std::to_string(range) + " must be in [1, 2^61-1)");
  }
  SplitMix64 gen(seed);
  std::vector<u64> coefficients;
  coefficients.reserve(t);
  while (coefficients.size() < t) {
    const u64 candidate = gen.next() >> 3; // 61 bits
    if (candidate < field::kPrime) coefficients.push_back(candidate);
  }
  return HashFn(std::move(coefficients), range, seed);
}

void horner_batch(std::span<const u64> coefficients, std::span<const u64> xs, std::span<u64> out) noexcept {
  // acc * x + c < 2^122 for reduced operands, so one reduction per step suffices.
  constexpr std::size_t kLanes = 8;
  const std::size_t n = xs.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    u64 x[kLanes], acc[kLanes] = {};
    for (std::size_t j = 0; j < kLanes; ++j) x[j] = xs[i + j];
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      for (std::size_t j = 0; j < kLanes; ++j) acc[j] = field::reduce(static_cast<u128>(acc[j]) * x[j] + *it);
    }
    for (std::size_t j = 0; j < kLanes; ++j) out[i + j] = acc[j];
  }
  for (; i < n; ++i) {
    u64 acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = field::reduce(static_cast<u128>(acc) * xs[i] + *it);
    out[i] = acc;
  }
}

namespace {
// Below this many points a node evaluates its remainder directly.
constexpr std::size_t kLeafPoints = 8;
} // namespace

MultipointEvaluator::MultipointEvaluator(std::span<const u64> xs, Strategy strategy) : points_(xs.begin(), xs.end()) {
  for (u64 x : points_) {
    if (x >= field::kPrime) throw ContractError("multipoint evaluation: point not reduced mod p");
  }
  if (points_.size() < kHornerCutoff || strategy == Strategy::Horner) return;
  if (strategy == Strategy::Auto && points_.size() < kTreeCrossover) return;

  // Bottom-up: blocks of kLeafPoints points, then pairwise products.
  std::vector<int> layer;
  for (std::size_t b = 0; b < points_.size(); b += kLeafPoints) {
    Node leaf;
    leaf.begin = b;
    leaf.end = std::min(points_.size(), b + kLeafPoints);
    leaf.poly = {1};
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
      const u64 lin[2] = {field::neg(points_[i]), 1};
      leaf.poly = poly::multiply(leaf.poly, lin);
    }
    nodes_.push_back(std::move(leaf));
    layer.push_back(static_cast<int>(nodes_.size() - 1));
  }
  while (layer.size() > 1) {
    std::vector<int> next;
    for (std::size_t i = 0; i + 1 < layer.size(); i += 2) {
      Node parent;
      parent.left = layer[i];
      parent.right = layer[i + 1];
      parent.begin = nodes_[parent.left].begin;
      parent.end = nodes_[parent.right].end;
      parent.poly = poly::multiply(nodes_[parent.left].poly, nodes_[parent.right].poly);
      nodes_.push_back(std::move(parent));
      next.push_back(static_cast<int>(nodes_.size() - 1));
    }
    if (layer.size() % 2 == 1) next.push_back(layer.back());
    layer = std::move(next);
  }
  root_ = layer.front();
}

void MultipointEvaluator::descend(int index, std::vector<u64> rem, std::span<u64> out) const {
  const Node& node = nodes_[index];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) out[i] = poly::evaluate(rem, points_[i]);
    return;
  }
  descend(node.left, poly::remainder_monic(rem, nodes_[node.left].poly), out);
  descend(node.right, poly::remainder_monic(rem, nodes_[node.right].poly), out);
}

void MultipointEvaluator::evaluate(const HashFn& h, std::span<u64> out) const {
  if (points_.size() > h.independence()) {
    throw ContractError("multipoint evaluation: batch of " + std::to_string(points_.size()) +
                        " points exceeds t=" + std::to_string(h.independence()));
  }
  if (out.size() != points_.size()) throw ContractError("multipoint evaluation: output size mismatch");
  if (root_ < 0) {
    horner_batch(h.coefficients(), points_, out);
  } else {
    const auto coeffs = h.coefficients();
    descend(root_, poly::remainder_monic(coeffs, nodes_[root_].poly), out);
  }
  const u64 range = h.range();
  for (u64& v : out) v %= range;
}

std::vector<u64> MultipointEvaluator::evaluate(const HashFn& h) const {
  std::vector<u64> out(points_.size());
  evaluate(h, out);
  return out;
}

std::vector<u64> multipoint_eval(const HashFn& h, std::span<const u64> xs, MultipointEvaluator::Strategy strategy) {
  if (xs.size() > h.independence()) {
    throw ContractError("multipoint_eval: batch larger than independence degree");
  }
  return MultipointEvaluator(xs, strategy).evaluate(h);
}

} // namespace tsketch
