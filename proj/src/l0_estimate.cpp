#include "tsketch/l0_estimate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "tsketch/errors.hpp"

namespace tsketch {

AmplifiedL0Estimator::AmplifiedL0Estimator(std::size_t instances, std::size_t independence, u64 seed, u64 universe,
                                           double alpha)
    : instances_(instances),
      universe_(universe),
      alpha_(alpha),
      split_(make_hash(derive_seed(seed, 0x04, 0), independence, instances == 0 ? 1 : instances)),
      base_(make_hash(derive_seed(seed, 0x04, 1), independence, kBaseRange)),
      cells_(instances * kDepths * kBuckets) {
  if (instances == 0) throw ConfigError("L0 estimator needs at least one instance");
  if (!(alpha > 1.0)) throw ConfigError("L0 estimator: alpha must be > 1");
}

void AmplifiedL0Estimator::update_hashed(u64 k, i64 c, u64 split_value, u64 base_value) noexcept {
  const std::size_t bucket = base_value & (kBuckets - 1);
  const u64 depth_bits = (base_value >> 6) | (u64{1} << (kDepths - 1));
  const auto depth = static_cast<std::size_t>(std::countr_zero(depth_bits));
  const u64 guard = base_value >> kGuardShift;
  cells_[(split_value * kDepths + depth) * kBuckets + bucket].insert(k, c, guard);
}

double AmplifiedL0Estimator::instance_estimate(std::size_t instance) const {
  std::array<std::size_t, kDepths> occupied{};
  const NonStrictBinSketch* base = cells_.data() + instance * kDepths * kBuckets;
  for (std::size_t d = 0; d < kDepths; ++d) {
    for (std::size_t b = 0; b < kBuckets; ++b) occupied[d] += base[d * kBuckets + b].is_zero() ? 0 : 1;
  }
  // Shallowest depth from which every deeper depth is unsaturated.
  std::size_t start = kDepths;
  while (start > 0 && occupied[start - 1] <= kSaturated) --start;
  if (start == kDepths) start = kDepths - 1; // deepest depth saturated: best effort

  double distinct = 0.0;
  const double buckets = static_cast<double>(kBuckets);
  for (std::size_t d = start; d < kDepths; ++d) {
    const double fill = std::min(static_cast<double>(occupied[d]), buckets - 0.5);
    distinct += -buckets * std::log1p(-fill / buckets);
  }
  return std::ldexp(distinct, static_cast<int>(start));
}

std::vector<double> AmplifiedL0Estimator::instance_estimates() const {
  std::vector<double> out(instances_);
  for (std::size_t i = 0; i < instances_; ++i) out[i] = instance_estimate(i);
  return out;
}

double AmplifiedL0Estimator::estimate() const {
  std::vector<double> ests = instance_estimates();
  double sum = 0.0;
  for (double e : ests) sum += e;
  std::sort(ests.begin(), ests.end());
  const std::size_t n = ests.size();
  const double median = n % 2 == 1 ? ests[n / 2] : 0.5 * (ests[n / 2 - 1] + ests[n / 2]);
  const double raw = median < kSparseMedian ? sum : median * static_cast<double>(n);
  // Centre the estimate in [L0, alpha L0].
  return raw * std::sqrt(alpha_);
}

bool AmplifiedL0Estimator::compatible(const AmplifiedL0Estimator& other) const noexcept {
  return instances_ == other.instances_ && universe_ == other.universe_ && alpha_ == other.alpha_ &&
         split_ == other.split_ && base_ == other.base_;
}

void AmplifiedL0Estimator::merge(const AmplifiedL0Estimator& other, int sign) {
  if (!compatible(other)) throw MergeError("L0 estimators were built with different parameters or seeds");
  for (std::size_t i = 0; i < cells_.size(); ++i) accumulate(cells_[i], other.cells_[i], sign);
}

void ExactL0Counter::update(u64 k, i64 c) {
  if (c == 0) return;
  auto [it, inserted] = totals_.try_emplace(k, 0);
  it->second += c;
  if (it->second == 0) totals_.erase(it);
}

void ExactL0Counter::set_total(u64 k, i128 total) {
  if (total == 0) {
    totals_.erase(k);
  } else {
    totals_[k] = total;
  }
}

void ExactL0Counter::merge(const ExactL0Counter& other, int sign) {
  for (const auto& [k, total] : other.totals_) {
    auto [it, inserted] = totals_.try_emplace(k, 0);
    it->second += sign >= 0 ? total : -total;
    if (it->second == 0) totals_.erase(it);
  }
}

void L0Estimator::update(u64 k, i64 c) {
  std::visit([&](auto& impl) { impl.update(k, c); }, impl_);
}

double L0Estimator::estimate() const {
  return std::visit([](const auto& impl) { return impl.estimate(); }, impl_);
}

void L0Estimator::merge(const L0Estimator& other, int sign) {
  if (impl_.index() != other.impl_.index()) throw MergeError("L0 estimators of different kinds");
  if (auto* a = amplified()) {
    a->merge(*other.amplified(), sign);
  } else {
    exact()->merge(*other.exact(), sign);
  }
}

} // namespace tsketch
