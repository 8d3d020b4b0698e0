#pragma once

// Estimators over an exact sample: the inverse distribution
// f^-1(i) = |{k : C_k = i}| / |{k : C_k != 0}| and queries built on it, plus
// coordinated Jaccard similarity of two sketches.

#include <cstddef>
#include <span>
#include <vector>

#include "tsketch/sampler.hpp"
#include "tsketch/types.hpp"

namespace tsketch {

struct Estimate {
  double value = 0.0;
  /// Additive error that holds with probability 1 - delta.
  double error_bound = 0.0;
};

/// Inputs of the reported error bound: sqrt(4 ln(1/delta) / |S|) + partial,
/// where partial is eps for samples taken from eFRS structures.
struct ErrorSpec {
  double delta = 0.1;
  double partial = 0.0;
};

ErrorSpec error_spec(const SamplerConfig& config) noexcept;
double query_error(std::size_t sample_size, const ErrorSpec& spec) noexcept;

/// Share of sampled values whose total is `freq` (freq != 0).
Estimate inverse_point(std::span<const SampleEntry> sample, i128 freq, const ErrorSpec& spec = {});
/// Share of sampled values whose total lies in [lo, hi].
Estimate inverse_range(std::span<const SampleEntry> sample, i128 lo, i128 hi, const ErrorSpec& spec = {});

struct FrequencyShare {
  i128 frequency = 0;
  double share = 0.0;

  bool operator==(const FrequencyShare&) const = default;
};

/// Frequencies whose inverse point estimate is at least phi, ascending.
std::vector<FrequencyShare> inverse_heavy_hitters(std::span<const SampleEntry> sample, double phi);
/// Smallest frequency i whose cumulative share over ascending frequencies
/// reaches phi, phi in (0, 1].
i128 inverse_quantile(std::span<const SampleEntry> sample, double phi);

/// Estimates |A n B| / |A u B| of the supports: the union sketch picks the
/// level, and a value counts as shared when both a and b recover it there.
/// Throws MergeError for incompatible sketches, EstimationError when any of
/// the three recoveries fails or the union is empty.
Estimate jaccard(SamplerSketch& a, SamplerSketch& b);

/// Tail bound for a sum Z of l-wise independent indicators:
/// Pr[|Z - E[Z]| > alpha E[Z]] <= min(1, 48 l / alpha (6 l / (alpha^2 E[Z]))^((l-1)/2)).
/// l must be even and >= 2.
double tail_bound(double expected, unsigned l, double alpha);

} // namespace tsketch
