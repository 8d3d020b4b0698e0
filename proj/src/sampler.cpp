#include "tsketch/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsketch/errors.hpp"

namespace tsketch {

const char* to_string(StreamModel model) noexcept {
  return model == StreamModel::Strict ? "strict" : "nonstrict";
}

const char* to_string(RecoveryKind kind) noexcept { return kind == RecoveryKind::Frs ? "frs" : "efrs"; }

namespace {

constexpr u128 kCounterLimit = u128{1} << 127;

u128 mul_sat(u128 a, u128 b) noexcept {
  u128 out = 0;
  if (__builtin_mul_overflow(a, b, &out)) return ~u128{0};
  return out;
}

void admit(const char* what, u128 bound) {
  if (bound >= kCounterLimit) {
    throw OverflowError(std::string("worst-case ") + what + " counter exceeds the signed 128-bit range; lower m, r or N_max");
  }
}

std::size_t ceil_pos(double v) { return v <= 1.0 ? 1 : static_cast<std::size_t>(std::ceil(v)); }

LevelMap make_level_map(const SamplerConfig& c, const DerivedParams& p) {
  const u64 range = c.effective_level_range();
  return LevelMap(c.lambda, range, c.alpha, make_hash(derive_seed(c.seed, 0x01, 0), p.level_independence, range));
}

L0Estimator make_l0(const SamplerConfig& c, const DerivedParams& p) {
  if (c.l0_kind == L0Kind::Exact) return L0Estimator(ExactL0Counter{});
  return L0Estimator(AmplifiedL0Estimator(p.l0_instances, p.level_independence, c.seed, c.universe, c.alpha));
}

} // namespace

DerivedParams derive_params(const SamplerConfig& c) {
  if (c.sample_size == 0) throw ConfigError("K must be positive");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta must be in (0, 1)");
  if (c.universe < 2 || c.universe >= field::kPrime / 2) throw ConfigError("m must be in [2, 2^60)");
  if (c.max_count == 0 || c.max_count > static_cast<u64>(INT64_MAX)) throw ConfigError("r must be in [1, 2^63)");
  if (c.max_length == 0) throw ConfigError("N_max must be positive");
  if (!(c.lambda > 0.0 && c.lambda < 1.0)) throw ConfigError("lambda must be in (0, 1)");
  if (!(c.alpha > 1.0)) throw ConfigError("alpha must be > 1");
  const u64 range = c.effective_level_range();
  if (range < 2 || range >= field::kPrime) throw ConfigError("M must be in [2, 2^61 - 1)");

  const double lg_delta = std::log2(1.0 / c.delta);
  const auto k = static_cast<double>(c.sample_size);
  if (c.recovery == RecoveryKind::Efrs) {
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("eps must be in (0, 1)");
    const double floor = SamplerConfig::kSampleFloor * lg_delta / c.epsilon;
    if (k < floor) {
      throw ConfigError("K = " + std::to_string(c.sample_size) + " is below the eFRS minimum (1/eps) log2(1/delta) = " +
                        std::to_string(floor));
    }
  } else {
    const double floor = SamplerConfig::kSampleFloor * lg_delta;
    if (k < floor) {
      throw ConfigError("K = " + std::to_string(c.sample_size) + " is below the FRS minimum log2(1/delta) = " +
                        std::to_string(floor));
    }
  }

  DerivedParams p;
  p.capacity = static_cast<u64>(std::ceil((2.0 * c.alpha / c.lambda + 1.0) * k - 1e-9));
  p.levels = LevelMap::count_levels(c.lambda, range);
  p.level_independence = std::max<std::size_t>(32, ceil_pos(2.0 * lg_delta));
  p.l0_instances = ceil_pos(SamplerConfig::kL0Instances * lg_delta);
  if (c.recovery == RecoveryKind::Frs) {
    p.frs = FrsParams::for_capacity(c.model, p.capacity, c.delta, c.universe);
    if (p.frs.array_size >= field::kPrime) throw ConfigError("FRS array size out of range");
  } else {
    p.efrs = EfrsParams::for_capacity(c.model, p.capacity, c.delta, c.universe);
    if (p.efrs.array_size >= field::kPrime || p.efrs.guard_range >= field::kPrime) {
      throw ConfigError("eFRS sizes out of range");
    }
  }

  const u128 nr = mul_sat(c.max_length, c.max_count);
  const u128 nrm = mul_sat(nr, c.universe);
  admit("Y", nrm);
  admit("Z", mul_sat(nrm, c.universe));
  if (c.recovery == RecoveryKind::Efrs) {
    admit("W", mul_sat(nr, p.efrs.array_size));
    if (c.model == StreamModel::NonStrict) admit("T", mul_sat(nr, p.efrs.guard_range));
  }
  if (c.l0_kind == L0Kind::Amplified) {
    admit("L0 guard", mul_sat(nr, AmplifiedL0Estimator::kBaseRange >> AmplifiedL0Estimator::kGuardShift));
  }
  return p;
}

SamplerSketch::SamplerSketch(SamplerConfig config)
    : config_(config),
      params_(derive_params(config_)),
      level_map_(make_level_map(config_, params_)),
      l0_(make_l0(config_, params_)) {
  if (config_.recovery == RecoveryKind::Frs) {
    frs_layout_ = std::make_shared<const FrsLayout>(params_.frs, config_.seed);
    frs_levels_.resize(params_.levels);
  } else {
    efrs_layout_ = std::make_shared<const EfrsLayout>(params_.efrs, config_.seed);
    efrs_levels_.resize(params_.levels);
  }
  buffer_.reserve(params_.level_independence);
}

void SamplerSketch::update(u64 k, i64 c) {
  if (k == 0 || k >= config_.universe) {
    throw InputError("value " + std::to_string(k) + " outside [1, " + std::to_string(config_.universe) + ")");
  }
  const u64 mag = c < 0 ? u64{0} - static_cast<u64>(c) : static_cast<u64>(c);
  if (mag > config_.max_count) {
    throw InputError("count " + std::to_string(c) + " exceeds r = " + std::to_string(config_.max_count));
  }
  if (length_ >= config_.max_length) throw InputError("stream longer than N_max = " + std::to_string(config_.max_length));
  ++length_;
  buffer_.push_back({k, c});
  if (buffer_.size() >= params_.level_independence) apply_batch();
}

void SamplerSketch::flush() {
  if (!buffer_.empty()) apply_batch();
}

void SamplerSketch::apply_batch() {
  const std::size_t n = buffer_.size();
  std::vector<u64> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = buffer_[i].value;
  const MultipointEvaluator ev(xs);

  std::vector<u64> levels(n);
  ev.evaluate(level_map_.hash(), levels);

  if (auto* amp = l0_.amplified()) {
    std::vector<u64> split(n), base(n);
    ev.evaluate(amp->split_hash(), split);
    ev.evaluate(amp->base_hash(), base);
    for (std::size_t i = 0; i < n; ++i) amp->update_hashed(xs[i], buffer_[i].count, split[i], base[i]);
  } else {
    for (const auto& u : buffer_) l0_.update(u.value, u.count);
  }

  if (frs_layout_) {
    for (std::size_t i = 0; i < n; ++i) {
      frs_level_mut(level_map_.level_of_hash(levels[i])).insert(xs[i], buffer_[i].count);
    }
  } else {
    std::vector<u64> b1(n), b2(n), guard(n, 0);
    ev.evaluate(efrs_layout_->hash(0), b1);
    ev.evaluate(efrs_layout_->hash(1), b2);
    if (efrs_layout_->non_strict()) ev.evaluate(efrs_layout_->guard(), guard);
    for (std::size_t i = 0; i < n; ++i) {
      efrs_level_mut(level_map_.level_of_hash(levels[i])).insert_hashed(xs[i], buffer_[i].count, b1[i], b2[i], guard[i]);
    }
  }
  buffer_.clear();
}

const Frs* SamplerSketch::frs_level(std::size_t level) const noexcept {
  if (level >= frs_levels_.size() || !frs_levels_[level]) return nullptr;
  return &*frs_levels_[level];
}

const Efrs* SamplerSketch::efrs_level(std::size_t level) const noexcept {
  if (level >= efrs_levels_.size() || !efrs_levels_[level]) return nullptr;
  return &*efrs_levels_[level];
}

Frs& SamplerSketch::frs_level_mut(std::size_t level) {
  if (!frs_layout_ || level >= frs_levels_.size()) throw ContractError("no FRS level " + std::to_string(level));
  auto& slot = frs_levels_[level];
  if (!slot) slot.emplace(frs_layout_);
  return *slot;
}

Efrs& SamplerSketch::efrs_level_mut(std::size_t level) {
  if (!efrs_layout_ || level >= efrs_levels_.size()) throw ContractError("no eFRS level " + std::to_string(level));
  auto& slot = efrs_levels_[level];
  if (!slot) slot.emplace(efrs_layout_);
  return *slot;
}

double SamplerSketch::l0_estimate() {
  flush();
  return l0_.estimate();
}

std::optional<std::vector<SampleEntry>> SamplerSketch::recover_level(std::size_t level) {
  if (level >= params_.levels) throw ContractError("level " + std::to_string(level) + " out of range");
  flush();
  if (frs_layout_) {
    const Frs* f = frs_level(level);
    if (f == nullptr) return std::vector<SampleEntry>{};
    return f->recover();
  }
  const Efrs* e = efrs_level(level);
  if (e == nullptr) return std::vector<SampleEntry>{};
  return e->recover().entries;
}

void SamplerSketch::add_recovery(std::size_t level, Sample& out, bool& ok) {
  if (frs_layout_) {
    const Frs* f = frs_level(level);
    if (f == nullptr) return;
    auto got = f->recover();
    if (!got) {
      ok = false;
      return;
    }
    out.entries.insert(out.entries.end(), got->begin(), got->end());
    return;
  }
  const Efrs* e = efrs_level(level);
  if (e == nullptr) return;
  EfrsRecovery r = e->recover();
  out.entries.insert(out.entries.end(), r.entries.begin(), r.entries.end());
  out.report.residual_bins += r.residual_bins;
  out.report.flagged_bins += r.flagged_bins;
}

Sample SamplerSketch::extract_at(std::size_t level, bool all_levels) {
  if (level >= params_.levels) throw ContractError("level " + std::to_string(level) + " out of range");
  flush();
  Sample out;
  out.report.level = level;
  out.report.all_levels = all_levels;
  out.report.l0_estimate = l0_.estimate();
  bool ok = true;
  const std::size_t last = all_levels ? params_.levels : level + 1;
  for (std::size_t l = level; l < last && ok; ++l) add_recovery(l, out, ok);
  if (!ok) throw ExtractionError("recovery failed at level " + std::to_string(level));
  std::sort(out.entries.begin(), out.entries.end());
  return out;
}

Sample SamplerSketch::extract() { return extract(config_.sample_size); }

Sample SamplerSketch::extract(u64 target) {
  if (target == 0 || target > config_.sample_size) {
    throw ContractError("extraction target must be in [1, K]");
  }
  flush();
  Sample out;
  out.report.l0_estimate = l0_.estimate();
  const auto choice = level_map_.select_level(out.report.l0_estimate, target);
  if (!choice) return out;

  out.report.level_clamped = choice->clamped;
  // Below the level-0 target the estimate bounds L0 under the per-level capacity.
  const bool all_levels = choice->clamped && choice->level == 0;
  const std::size_t max_fallback = (frs_layout_ && config_.model == StreamModel::Strict && !all_levels) ? 2 : 0;
  for (std::size_t depth = 0; depth <= max_fallback; ++depth) {
    const std::size_t level = choice->level + depth;
    if (level >= params_.levels) break;
    Sample attempt;
    bool ok = true;
    const std::size_t last = all_levels ? params_.levels : level + 1;
    for (std::size_t l = level; l < last && ok; ++l) add_recovery(l, attempt, ok);
    if (!ok) continue;
    std::sort(attempt.entries.begin(), attempt.entries.end());
    out.entries = std::move(attempt.entries);
    out.report.level = level;
    out.report.all_levels = all_levels;
    out.report.fallback_depth = depth;
    out.report.residual_bins = attempt.report.residual_bins;
    out.report.flagged_bins = attempt.report.flagged_bins;
    return out;
  }
  throw ExtractionError("recovery failed at level " + std::to_string(choice->level) + " and its fallback levels");
}

bool SamplerSketch::compatible(const SamplerSketch& other) const noexcept { return config_ == other.config_; }

void SamplerSketch::merge(const SamplerSketch& other, int sign) {
  if (sign != 1 && sign != -1) throw ContractError("merge sign must be +1 or -1");
  if (!compatible(other)) throw MergeError("sketches differ in configuration or seed");
  if (sign < 0 && config_.model != StreamModel::NonStrict) {
    throw ModelError("difference needs non-strict sketches: the result may hold negative totals");
  }
  if (other.pending() != 0) throw ContractError("merge operand has unflushed updates");
  if (other.length_ > config_.max_length - std::min(config_.max_length, length_)) {
    throw OverflowError("merged stream length exceeds N_max");
  }
  flush();
  l0_.merge(other.l0_, sign);
  for (std::size_t l = 0; l < params_.levels; ++l) {
    if (frs_layout_) {
      if (const Frs* f = other.frs_level(l)) frs_level_mut(l).merge(*f, sign);
    } else {
      if (const Efrs* e = other.efrs_level(l)) efrs_level_mut(l).merge(*e, sign);
    }
  }
  length_ += other.length_;
}

} // namespace tsketch
