#include "tsketch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tsketch/errors.hpp"

namespace tsketch {

namespace {

void require_nonempty(std::span<const SampleEntry> sample) {
  if (sample.empty()) throw EstimationError("the inverse distribution is undefined on an empty sample");
}

std::map<i128, std::size_t> histogram(std::span<const SampleEntry> sample) {
  std::map<i128, std::size_t> h;
  for (const auto& e : sample) ++h[e.count];
  return h;
}

} // namespace

ErrorSpec error_spec(const SamplerConfig& config) noexcept {
  return {config.delta, config.recovery == RecoveryKind::Efrs ? config.epsilon : 0.0};
}

double query_error(std::size_t sample_size, const ErrorSpec& spec) noexcept {
  if (sample_size == 0) return 1.0;
  return std::min(1.0, std::sqrt(4.0 * std::log(1.0 / spec.delta) / static_cast<double>(sample_size)) + spec.partial);
}

Estimate inverse_point(std::span<const SampleEntry> sample, i128 freq, const ErrorSpec& spec) {
  if (freq == 0) throw ContractError("inverse point query at frequency 0");
  return inverse_range(sample, freq, freq, spec);
}

Estimate inverse_range(std::span<const SampleEntry> sample, i128 lo, i128 hi, const ErrorSpec& spec) {
  if (lo > hi) throw ContractError("inverse range query needs lo <= hi");
  require_nonempty(sample);
  const auto hits = std::count_if(sample.begin(), sample.end(),
                                  [&](const SampleEntry& e) { return e.count >= lo && e.count <= hi; });
  return {static_cast<double>(hits) / static_cast<double>(sample.size()), query_error(sample.size(), spec)};
}

std::vector<FrequencyShare> inverse_heavy_hitters(std::span<const SampleEntry> sample, double phi) {
  if (!(phi > 0.0)) throw ContractError("heavy hitter threshold must be positive");
  require_nonempty(sample);
  std::vector<FrequencyShare> out;
  const auto n = static_cast<double>(sample.size());
  for (const auto& [freq, hits] : histogram(sample)) {
    const double share = static_cast<double>(hits) / n;
    if (share >= phi) out.push_back({freq, share});
  }
  return out;
}

i128 inverse_quantile(std::span<const SampleEntry> sample, double phi) {
  if (!(phi > 0.0 && phi <= 1.0)) throw ContractError("quantile must be in (0, 1]");
  require_nonempty(sample);
  const auto need = phi * static_cast<double>(sample.size());
  std::size_t cumulative = 0;
  const auto h = histogram(sample);
  for (const auto& [freq, hits] : h) {
    cumulative += hits;
    if (static_cast<double>(cumulative) >= need) return freq;
  }
  return h.rbegin()->first;
}

Estimate jaccard(SamplerSketch& a, SamplerSketch& b) {
  if (!a.compatible(b)) throw MergeError("sketches differ in configuration or seed");
  a.flush();
  b.flush();
  SamplerSketch joint = a;
  joint.merge(b, +1);

  try {
    const Sample su = joint.extract();
    if (!su.report.level || su.empty()) throw EstimationError("Jaccard similarity is undefined for empty streams");
    const Sample sa = a.extract_at(*su.report.level, su.report.all_levels);
    const Sample sb = b.extract_at(*su.report.level, su.report.all_levels);
    auto has = [](const Sample& s, u64 k) {
      return std::binary_search(s.entries.begin(), s.entries.end(), SampleEntry{k, 0});
    };
    const auto shared = std::count_if(su.entries.begin(), su.entries.end(),
                                      [&](const SampleEntry& e) { return has(sa, e.value) && has(sb, e.value); });
    return {static_cast<double>(shared) / static_cast<double>(su.size()),
            query_error(su.size(), error_spec(a.config()))};
  } catch (const ExtractionError& e) {
    throw EstimationError(std::string("Jaccard recovery failed: ") + e.what());
  }
}

double tail_bound(double expected, unsigned l, double alpha) {
  if (l < 2 || l % 2 != 0) throw ContractError("moment order must be even and >= 2");
  if (!(expected > 0.0) || !(alpha > 0.0)) throw ContractError("expected value and deviation factor must be positive");
  const double base = 6.0 * l / (alpha * alpha * expected);
  if (base >= 1.0) return 1.0;
  const double bound = 48.0 * l / alpha * std::pow(base, (static_cast<double>(l) - 1.0) / 2.0);
  return std::min(1.0, bound);
}

} // namespace tsketch
