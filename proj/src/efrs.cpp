#include "tsketch/efrs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <type_traits>

#include "tsketch/errors.hpp"

namespace tsketch {

EfrsParams EfrsParams::for_capacity(StreamModel mode, u64 capacity, double delta, u64 universe) {
  if (capacity == 0) throw ConfigError("eFRS capacity must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("eFRS delta must be in (0, 1)");
  EfrsParams p;
  p.mode = mode;
  p.universe = universe;
  p.array_size = 4 * capacity;
  const double lg = std::log2(static_cast<double>(capacity) / delta);
  auto t = static_cast<std::size_t>(std::max(32.0, std::ceil(2.0 * lg)));
  p.independence = t + (t % 2);
  if (mode == StreamModel::NonStrict) {
    p.guard_range = static_cast<u64>(std::ceil(4.0 * static_cast<double>(capacity) / delta));
  }
  return p;
}

EfrsLayout::EfrsLayout(EfrsParams params, u64 seed)
    : params_(params),
      h1_(make_hash(derive_seed(seed, 0x02, 0), params.independence, params.array_size)),
      h2_(make_hash(derive_seed(seed, 0x02, 1), params.independence, params.array_size)) {
  if (params_.mode == StreamModel::NonStrict) {
    guard_ = make_hash(derive_seed(seed, 0x03, 0), params.independence, params.guard_range);
  }
  check();
}

EfrsLayout::EfrsLayout(EfrsParams params, HashFn h1, HashFn h2, std::optional<HashFn> guard)
    : params_(params), h1_(std::move(h1)), h2_(std::move(h2)) {
  if (guard) guard_ = std::move(*guard);
  if (non_strict() && !guard) throw ConfigError("eFRS: non-strict mode needs a guard hash");
  check();
}

void EfrsLayout::check() const {
  if (params_.array_size == 0) throw ConfigError("eFRS array size must be positive");
  if (h1_.range() != params_.array_size || h2_.range() != params_.array_size) {
    throw ConfigError("eFRS hash ranges must equal the array size");
  }
  if (non_strict() && (params_.guard_range < 2 || guard_.range() != params_.guard_range)) {
    throw ConfigError("eFRS guard hash range must equal q >= 2");
  }
}

Efrs::Efrs(std::shared_ptr<const EfrsLayout> layout) : layout_(std::move(layout)) {
  const std::size_t bins = 2 * layout_->params().array_size;
  if (layout_->non_strict()) {
    nonstrict_.resize(bins);
  } else {
    strict_.resize(bins);
  }
}

void Efrs::insert(u64 k, i64 c) noexcept {
  const u64 g = layout_->non_strict() ? layout_->guard()(k) : 0;
  insert_hashed(k, c, layout_->hash(0)(k), layout_->hash(1)(k), g);
}

void Efrs::insert_hashed(u64 k, i64 c, u64 b1, u64 b2, u64 guard_value) noexcept {
  const std::size_t s = array_size();
  if (layout_->non_strict()) {
    nonstrict_[b1].insert(k, c, guard_value, b2);
    nonstrict_[s + b2].insert(k, c, guard_value, b1);
  } else {
    strict_[b1].insert(k, c, b2);
    strict_[s + b2].insert(k, c, b1);
  }
}

CellVerdict Efrs::classify(std::size_t array, std::size_t bin) const noexcept {
  const std::size_t i = array * array_size() + bin;
  const u64 universe = layout_->params().universe;
  if (layout_->non_strict()) return classify_nonstrict(nonstrict_[i], universe, layout_->guard());
  return classify_strict(strict_[i], universe);
}

i128 Efrs::locator(std::size_t array, std::size_t bin) const noexcept {
  const std::size_t i = array * array_size() + bin;
  return layout_->non_strict() ? nonstrict_[i].w : strict_[i].w;
}

bool Efrs::is_zero() const noexcept {
  return std::all_of(strict_.begin(), strict_.end(), [](const auto& c) { return c.is_zero(); }) &&
         std::all_of(nonstrict_.begin(), nonstrict_.end(), [](const auto& c) { return c.is_zero(); });
}

template <class Cell>
EfrsRecovery Efrs::peel(std::vector<Cell> work) const {
  constexpr bool kNonStrict = std::is_same_v<Cell, NonStrictBinSketch>;
  const std::size_t s = array_size();
  const u64 universe = layout_->params().universe;
  const HashFn& guard = layout_->guard();
  auto verdict = [&](const Cell& cell) {
    if constexpr (kNonStrict) {
      return classify_nonstrict(cell, universe, guard);
    } else {
      return classify_strict(cell, universe);
    }
  };

  EfrsRecovery out;
  std::vector<std::size_t> queue; // FIFO via head index
  std::vector<char> queued(2 * s, 0);
  queue.reserve(2 * s);
  for (std::size_t b = 0; b < 2 * s; ++b) {
    if (verdict(work[b]).is_single()) {
      queue.push_back(b);
      queued[b] = 1;
    }
  }

  std::map<u64, i128> found;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t b = queue[head];
    queued[b] = 0;
    ++out.queue_ops;
    const CellVerdict v = verdict(work[b]);
    if (!v.is_single()) continue;

    const i128 c = v.count;
    const i128 w = work[b].w;
    if (w % c != 0) {
      ++out.flagged_bins;
      continue;
    }
    const i128 twin_bin = w / c;
    if (twin_bin < 0 || twin_bin >= static_cast<i128>(s)) {
      ++out.flagged_bins;
      continue;
    }

    const std::size_t array = b / s;
    const std::size_t own_bin = b % s;
    const std::size_t twin = (1 - array) * s + static_cast<std::size_t>(twin_bin);
    if (!found.try_emplace(v.value, c).second) ++out.duplicates;

    Cell& other = work[twin];
    const i128 ck = c * static_cast<i128>(v.value);
    other.x -= c;
    other.y -= ck;
    other.z -= ck * static_cast<i128>(v.value);
    other.w -= c * static_cast<i128>(own_bin);
    if constexpr (kNonStrict) other.t -= work[b].t; // T = C h_T(k), verified by the classifier
    work[b] = Cell{};

    if (!queued[twin]) {
      queued[twin] = 1;
      queue.push_back(twin);
    }
  }

  out.residual_bins = static_cast<std::size_t>(
      std::count_if(work.begin(), work.end(), [](const Cell& cell) { return !cell.is_zero(); }));
  out.entries.reserve(found.size());
  for (const auto& [k, c] : found) out.entries.push_back({k, c});
  return out;
}

EfrsRecovery Efrs::recover() const {
  if (layout_->non_strict()) return peel(nonstrict_);
  return peel(strict_);
}

void Efrs::merge(const Efrs& other, int sign) {
  if (layout_ != other.layout_ && !(*layout_ == *other.layout_)) {
    throw MergeError("eFRS structures use different parameters or hash functions");
  }
  for (std::size_t i = 0; i < strict_.size(); ++i) accumulate(strict_[i], other.strict_[i], sign);
  for (std::size_t i = 0; i < nonstrict_.size(); ++i) accumulate(nonstrict_[i], other.nonstrict_[i], sign);
}

} // namespace tsketch
