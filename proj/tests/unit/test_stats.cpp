#include <gtest/gtest.h>

#include <cmath>

#include "tsketch/errors.hpp"
#include "tsketch/stats.hpp"

using namespace tsketch;

namespace {

std::vector<SampleEntry> sample_of(std::initializer_list<std::pair<u64, i64>> pairs) {
  std::vector<SampleEntry> out;
  for (auto [k, c] : pairs) out.push_back({k, c});
  return out;
}

SamplerConfig small_config() {
  SamplerConfig c;
  c.sample_size = 64;
  return c;
}

} // namespace

TEST(InversePoint, Basics) {
  const auto ones = sample_of({{1, 1}, {2, 1}, {3, 1}});
  EXPECT_EQ(inverse_point(ones, 1).value, 1.0);
  EXPECT_EQ(inverse_point(ones, 2).value, 0.0);
  const auto mixed = sample_of({{1, 1}, {2, 2}, {3, 2}, {4, -1}});
  EXPECT_EQ(inverse_point(mixed, 2).value, 0.5);
  EXPECT_EQ(inverse_point(mixed, -1).value, 0.25);
  EXPECT_THROW(inverse_point(mixed, 0), ContractError);
  EXPECT_THROW(inverse_point({}, 1), EstimationError);
}

TEST(InversePoint, SumsToOneOverObservedFrequencies) {
  const auto s = sample_of({{1, 1}, {2, 2}, {3, 2}, {4, 7}, {5, -3}, {6, 1}});
  double total = 0;
  for (i64 f : {-3, 1, 2, 7}) total += inverse_point(s, f).value;
  EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(InversePoint, ErrorBound) {
  const auto s = sample_of({{1, 1}, {2, 1}});
  const ErrorSpec spec{0.1, 0.0};
  EXPECT_DOUBLE_EQ(query_error(400, spec), std::sqrt(4 * std::log(10.0) / 400));
  EXPECT_DOUBLE_EQ(query_error(400, {0.1, 0.1}), std::sqrt(4 * std::log(10.0) / 400) + 0.1);
  EXPECT_EQ(inverse_point(s, 1, spec).error_bound, 1.0); // capped
  SamplerConfig c;
  c.recovery = RecoveryKind::Efrs;
  c.epsilon = 0.05;
  EXPECT_EQ(error_spec(c).partial, 0.05);
  c.recovery = RecoveryKind::Frs;
  EXPECT_EQ(error_spec(c).partial, 0.0);
}

TEST(InverseRange, Basics) {
  const auto s = sample_of({{1, 1}, {2, 2}, {3, 3}, {4, 10}});
  EXPECT_EQ(inverse_range(s, 1, 10).value, 1.0);
  EXPECT_EQ(inverse_range(s, 2, 3).value, 0.5);
  EXPECT_EQ(inverse_range(s, 4, 9).value, 0.0);
  EXPECT_THROW(inverse_range(s, 3, 2), ContractError);
}

TEST(InverseHeavyHitters, Threshold) {
  const auto s = sample_of({{1, 1}, {2, 1}, {3, 1}, {4, 2}});
  EXPECT_EQ(inverse_heavy_hitters(s, 0.5), (std::vector<FrequencyShare>{{1, 0.75}}));
  EXPECT_EQ(inverse_heavy_hitters(s, 0.25).size(), 2u);
  EXPECT_TRUE(inverse_heavy_hitters(s, 1.5).empty());
  EXPECT_THROW(inverse_heavy_hitters(s, 0.0), ContractError);
}

TEST(InverseQuantile, CumulativeByAscendingFrequency) {
  const auto half = sample_of({{1, 1}, {2, 1}, {3, 2}, {4, 2}});
  EXPECT_EQ(inverse_quantile(half, 0.5), 1);
  EXPECT_EQ(inverse_quantile(half, 0.51), 2);
  EXPECT_EQ(inverse_quantile(half, 1.0), 2);
  const auto neg = sample_of({{1, -4}, {2, 1}, {3, 9}});
  EXPECT_EQ(inverse_quantile(neg, 0.3), -4);
  EXPECT_EQ(inverse_quantile(neg, 0.7), 9);
  EXPECT_THROW(inverse_quantile(half, 0.0), ContractError);
  EXPECT_THROW(inverse_quantile(half, 1.1), ContractError);
}

TEST(TailBound, FormulaAndEdges) {
  EXPECT_EQ(tail_bound(10, 2, 1.0), 1.0); // 6l >= alpha^2 E
  const double e = 1e4, l = 10, a = 0.5;
  const double direct = 48 * l / a * std::pow(6 * l / (a * a * e), (l - 1) / 2);
  EXPECT_DOUBLE_EQ(tail_bound(e, 10, a), std::min(1.0, direct));
  EXPECT_LT(tail_bound(1e6, 10, 0.5), tail_bound(1e5, 10, 0.5));
  for (double x = 100; x < 1e8; x *= 2) EXPECT_LE(tail_bound(2 * x, 8, 0.3), tail_bound(x, 8, 0.3));
  EXPECT_THROW(tail_bound(100, 3, 0.5), ContractError);
  EXPECT_THROW(tail_bound(100, 0, 0.5), ContractError);
  EXPECT_THROW(tail_bound(0, 2, 0.5), ContractError);
}

TEST(Jaccard, IdenticalDisjointAndIncompatible) {
  SamplerSketch a(small_config()), b(small_config()), c(small_config());
  for (u64 k = 1; k <= 3000; ++k) {
    a.update(k, 1);
    b.update(k, 2);
    c.update(k + 100000, 1);
  }
  EXPECT_EQ(jaccard(a, b).value, 1.0);
  EXPECT_EQ(jaccard(a, c).value, 0.0);
  EXPECT_DOUBLE_EQ(jaccard(a, c).value, jaccard(c, a).value);
  auto other = small_config();
  other.seed = 99;
  SamplerSketch d(other);
  EXPECT_THROW(jaccard(a, d), MergeError);
  SamplerSketch e1(small_config()), e2(small_config());
  EXPECT_THROW(jaccard(e1, e2), EstimationError);
}

TEST(Jaccard, SmallSupportsAreExact) {
  SamplerSketch a(small_config()), b(small_config());
  for (u64 k = 1; k <= 30; ++k) a.update(k, 1);
  for (u64 k = 21; k <= 40; ++k) b.update(k, 1);
  EXPECT_DOUBLE_EQ(jaccard(a, b).value, 10.0 / 40.0);
}
