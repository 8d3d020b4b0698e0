#pragma once

// Exact sampling of a turnstile stream. Values are routed to one geometric
// level each; every level holds a recovery structure (FRS or eFRS) sized for
// the capacity C = (2 alpha / lambda + 1) K. Extraction picks the level whose
// expected population is Theta(K) from an L0 estimate and recovers it.
//
// Updates are buffered in batches of t_lvl values so that every hash is
// evaluated through one shared multipoint evaluation per batch. Queries flush.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsketch/efrs.hpp"
#include "tsketch/frs.hpp"
#include "tsketch/l0_estimate.hpp"
#include "tsketch/level_map.hpp"
#include "tsketch/types.hpp"

namespace tsketch {

enum class RecoveryKind : std::uint8_t { Frs = 0, Efrs = 1 };

const char* to_string(RecoveryKind kind) noexcept;

struct SamplerConfig {
  StreamModel model = StreamModel::Strict;
  RecoveryKind recovery = RecoveryKind::Frs;
  u64 sample_size = 64; // K
  double delta = 0.1;
  double epsilon = 0.1; // eFRS only
  u64 universe = u64{1} << 32; // m; values are in [1, m)
  u64 max_count = u64{1} << 31; // r; |c| <= r
  u64 max_length = u64{1} << 31; // N_max
  double lambda = 0.5;
  double alpha = 1.5;
  u64 level_range = 0; // M; 0 means 2m
  u64 seed = 0x5EED;
  L0Kind l0_kind = L0Kind::Amplified;

  /// Multiplier in the minimum sample sizes K >= c log2(1/delta) (FRS) and
  /// K >= c (1/eps) log2(1/delta) (eFRS).
  static constexpr double kSampleFloor = 1.0;
  /// Amplified L0 estimator instances: ceil(kL0Instances * log2(1/delta)).
  static constexpr double kL0Instances = 4.0;

  u64 effective_level_range() const noexcept { return level_range == 0 ? 2 * universe : level_range; }

  bool operator==(const SamplerConfig&) const = default;
};

/// Integer parameters implied by a config.
struct DerivedParams {
  u64 capacity = 0; // C
  std::size_t levels = 0;
  std::size_t level_independence = 0; // t_lvl, also the batch size
  std::size_t l0_instances = 0;
  FrsParams frs{};
  EfrsParams efrs{};

  bool operator==(const DerivedParams&) const = default;
};

/// Validates the config and computes derived parameters. Throws ConfigError
/// for inconsistent settings and OverflowError when worst-case counters could
/// exceed the signed 128-bit range.
DerivedParams derive_params(const SamplerConfig& config);

struct ExtractionReport {
  std::optional<std::size_t> level; // nullopt: empty stream
  double l0_estimate = 0.0;
  bool level_clamped = false;
  /// Set when the estimate is below the smallest level target: the whole
  /// support fits one level's capacity, so every level is recovered.
  bool all_levels = false;
  std::size_t fallback_depth = 0; // extra levels tried after a failed FRS recovery
  std::size_t residual_bins = 0; // eFRS bins left after peeling
  std::size_t flagged_bins = 0;
};

struct Sample {
  std::vector<SampleEntry> entries; // distinct values, ordered, nonzero totals
  ExtractionReport report;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

class SamplerSketch {
public:
  explicit SamplerSketch(SamplerConfig config);

  /// Requires 1 <= k < m and |c| <= r; throws InputError otherwise.
  void update(u64 k, i64 c);
  void update(const Update& u) { update(u.value, u.count); }
  void flush();
  std::size_t pending() const noexcept { return buffer_.size(); }

  /// Extracts a Theta(target) sample; target defaults to K. Flushes first.
  Sample extract();
  Sample extract(u64 target);

  /// Recovers one level as it stands: nullopt if an FRS strict recovery
  /// fails. Absent levels recover as empty.
  std::optional<std::vector<SampleEntry>> recover_level(std::size_t level);
  /// Recovery at a fixed level (or all levels) with no fallback; throws
  /// ExtractionError on failure. Used for coordinated extraction across sketches.
  Sample extract_at(std::size_t level, bool all_levels);

  /// this = this + sign * other. Both sides must be flushed; sign -1 needs the
  /// non-strict model.
  void merge(const SamplerSketch& other, int sign);
  bool compatible(const SamplerSketch& other) const noexcept;

  double l0_estimate();
  /// Updates ingested so far (merges add lengths); bounded by N_max.
  u64 length() const noexcept { return length_; }
  void set_length(u64 n) noexcept { length_ = n; }

  const SamplerConfig& config() const noexcept { return config_; }
  const DerivedParams& params() const noexcept { return params_; }
  const LevelMap& level_map() const noexcept { return level_map_; }
  const L0Estimator& l0() const noexcept { return l0_; }
  L0Estimator& l0() noexcept { return l0_; }

  std::size_t level_count() const noexcept { return params_.levels; }
  /// Level structures are materialized on first touch; absent means all zero.
  const Frs* frs_level(std::size_t level) const noexcept;
  const Efrs* efrs_level(std::size_t level) const noexcept;
  Frs& frs_level_mut(std::size_t level);
  Efrs& efrs_level_mut(std::size_t level);

  const std::shared_ptr<const FrsLayout>& frs_layout() const noexcept { return frs_layout_; }
  const std::shared_ptr<const EfrsLayout>& efrs_layout() const noexcept { return efrs_layout_; }

private:
  void apply_batch();
  void add_recovery(std::size_t level, Sample& out, bool& ok);

  SamplerConfig config_;
  DerivedParams params_;
  LevelMap level_map_;
  L0Estimator l0_;
  std::shared_ptr<const FrsLayout> frs_layout_;
  std::shared_ptr<const EfrsLayout> efrs_layout_;
  std::vector<std::optional<Frs>> frs_levels_;
  std::vector<std::optional<Efrs>> efrs_levels_;
  std::vector<Update> buffer_;
  u64 length_ = 0;
};

} // namespace tsketch
