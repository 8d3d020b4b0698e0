#include "tsketch/frs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "tsketch/errors.hpp"

namespace tsketch {

namespace {

std::size_t log2_ceil_ratio(u64 capacity, double delta) {
  const double v = std::ceil(std::log2(static_cast<double>(capacity) / delta));
  return v < 1.0 ? 1 : static_cast<std::size_t>(v);
}

void subtract(StrictBinSketch& cell, u64 k, i128 c) noexcept {
  const i128 ck = c * static_cast<i128>(k);
  cell.x -= c;
  cell.y -= ck;
  cell.z -= ck * static_cast<i128>(k);
}

} // namespace

FrsParams FrsParams::for_capacity(StreamModel mode, u64 capacity, double delta, u64 universe) {
  if (capacity == 0) throw ConfigError("FRS capacity must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("FRS delta must be in (0, 1)");
  FrsParams p;
  p.mode = mode;
  p.universe = universe;
  if (mode == StreamModel::Strict) {
    p.arrays = log2_ceil_ratio(capacity, delta);
    p.array_size = 2 * capacity;
  } else {
    const double lg = std::log2(static_cast<double>(capacity) / delta);
    p.candidate_arrays = log2_ceil_ratio(capacity, delta);
    p.arrays = std::max<std::size_t>(p.candidate_arrays + 1, static_cast<std::size_t>(std::ceil(5.0 * lg)));
    p.array_size = 8 * capacity;
  }
  return p;
}

FrsLayout::FrsLayout(FrsParams params, u64 seed) : params_(params) {
  if (params_.array_size < 1 || params_.array_size >= field::kPrime) throw ConfigError("FRS array size out of range");
  hashes_.reserve(params_.arrays);
  for (std::size_t a = 0; a < params_.arrays; ++a) {
    hashes_.push_back(make_hash(derive_seed(seed, 0x02, a), 2, params_.array_size));
  }
  init();
}

FrsLayout::FrsLayout(FrsParams params, std::vector<HashFn> hashes) : params_(params), hashes_(std::move(hashes)) {
  init();
}

void FrsLayout::init() {
  if (params_.arrays == 0) throw ConfigError("FRS needs at least one array");
  if (hashes_.size() != params_.arrays) throw ConfigError("FRS: one hash per array required");
  if (params_.mode == StreamModel::NonStrict &&
      (params_.candidate_arrays == 0 || params_.candidate_arrays >= params_.arrays)) {
    throw ConfigError("FRS: non-strict mode needs candidate arrays and voting arrays");
  }
  for (const auto& h : hashes_) {
    if (h.independence() != 2) throw ConfigError("FRS hashes must be pairwise (degree 1)");
    if (h.range() != params_.array_size) throw ConfigError("FRS hash range must equal the array size");
  }
  pair_.clear();
  for (const auto& h : hashes_) pair_.push_back({h.coefficients()[0], h.coefficients()[1]});
}

Frs::Frs(std::shared_ptr<const FrsLayout> layout)
    : layout_(std::move(layout)), cells_(layout_->params().arrays * layout_->params().array_size) {}

void Frs::insert(u64 k, i64 c) noexcept {
  const std::size_t s = layout_->params().array_size;
  const std::size_t arrays = layout_->params().arrays;
  for (std::size_t a = 0; a < arrays; ++a) cells_[a * s + layout_->bin(a, k)].insert(k, c);
}

bool Frs::is_zero() const noexcept {
  return std::all_of(cells_.begin(), cells_.end(), [](const StrictBinSketch& c) { return c.is_zero(); });
}

std::optional<std::vector<SampleEntry>> Frs::recover_strict() const {
  const auto& p = layout_->params();
  const u64 universe = p.universe;
  std::vector<StrictBinSketch> work = cells_;
  std::map<u64, i128> found;

  while (true) {
    std::map<u64, i128> round;
    for (const auto& cell : work) {
      const CellVerdict v = classify_strict(cell, universe);
      if (!v.is_single()) continue;
      if (found.contains(v.value)) return std::nullopt; // already peeled: inconsistent content
      auto [it, inserted] = round.try_emplace(v.value, v.count);
      if (!inserted && it->second != v.count) return std::nullopt;
    }
    if (round.empty()) break;
    for (const auto& [k, c] : round) {
      for (std::size_t a = 0; a < p.arrays; ++a) subtract(work[a * p.array_size + layout_->bin(a, k)], k, c);
      found.emplace(k, c);
    }
  }

  for (const auto& cell : work) {
    if (!cell.is_zero()) return std::nullopt;
  }
  std::vector<SampleEntry> out;
  out.reserve(found.size());
  for (const auto& [k, c] : found) out.push_back({k, c});
  return out;
}

std::vector<SampleEntry> Frs::recover_nonstrict() const {
  const auto& p = layout_->params();
  const u64 universe = p.universe;
  const std::size_t voters = p.arrays - p.candidate_arrays;

  std::set<std::pair<u64, i128>> candidates;
  for (std::size_t i = 0; i < p.candidate_arrays * p.array_size; ++i) {
    const CellVerdict v = classify_strict(cells_[i], universe);
    if (v.is_single()) candidates.emplace(v.value, v.count);
  }

  // value -> (count, votes); a second accepted pair for the same value makes
  // it ambiguous unless it has strictly more votes.
  std::map<u64, std::pair<i128, std::size_t>> accepted;
  std::set<u64> ambiguous;
  for (const auto& [k, c] : candidates) {
    std::size_t votes = 0;
    for (std::size_t a = p.candidate_arrays; a < p.arrays; ++a) {
      const CellVerdict v = classify_strict(cells_[a * p.array_size + layout_->bin(a, k)], universe);
      if (v.is_single() && v.value == k && v.count == c) ++votes;
    }
    if (2 * votes < voters) continue;
    auto [it, inserted] = accepted.try_emplace(k, c, votes);
    if (inserted) continue;
    if (votes > it->second.second) {
      it->second = {c, votes};
      ambiguous.erase(k);
    } else if (votes == it->second.second) {
      ambiguous.insert(k);
    }
  }

  std::vector<SampleEntry> out;
  for (const auto& [k, cv] : accepted) {
    if (!ambiguous.contains(k)) out.push_back({k, cv.first});
  }
  return out;
}

std::optional<std::vector<SampleEntry>> Frs::recover() const {
  if (layout_->params().mode == StreamModel::Strict) return recover_strict();
  return recover_nonstrict();
}

void Frs::merge(const Frs& other, int sign) {
  if (layout_ != other.layout_ && !(*layout_ == *other.layout_)) {
    throw MergeError("FRS structures use different parameters or hash functions");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) accumulate(cells_[i], other.cells_[i], sign);
}

} // namespace tsketch
