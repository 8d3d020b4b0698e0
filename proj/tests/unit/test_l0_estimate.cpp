#include <gtest/gtest.h>

#include <random>

#include "tsketch/errors.hpp"
#include "tsketch/l0_estimate.hpp"

using namespace tsketch;

namespace {

constexpr u64 kUniverse = u64{1} << 32;

AmplifiedL0Estimator make(u64 seed = 7) { return AmplifiedL0Estimator(14, 32, seed, kUniverse, 1.5); }

} // namespace

TEST(ExactL0Counter, TracksNonzeroTotals) {
  ExactL0Counter c;
  c.update(3, 2);
  c.update(4, -1);
  c.update(3, -2);
  c.update(5, 0);
  EXPECT_EQ(c.estimate(), 1.0);
  EXPECT_EQ(c.totals().at(4), -1);
  ExactL0Counter d;
  d.update(4, -1);
  c.merge(d, -1);
  EXPECT_EQ(c.estimate(), 0.0);
  c.set_total(9, 3);
  c.set_total(9, 0);
  EXPECT_TRUE(c.totals().empty());
}

TEST(AmplifiedL0, EmptyIsZero) { EXPECT_EQ(make().estimate(), 0.0); }

TEST(AmplifiedL0, WithinAlphaBandAcrossScales) {
  for (u64 n : {1, 10, 200, 5000, 60000}) {
    for (u64 seed = 0; seed < 5; ++seed) {
      auto e = make(seed);
      std::mt19937_64 rng(seed + 100);
      for (u64 i = 0; i < n; ++i) e.update(rng() % (kUniverse - 1) + 1, 1);
      const double est = e.estimate();
      EXPECT_GE(est, 0.95 * static_cast<double>(n)) << "n=" << n;
      EXPECT_LE(est, 1.55 * static_cast<double>(n)) << "n=" << n;
    }
  }
}

TEST(AmplifiedL0, DeletionsAndNegativeTotals) {
  auto e = make();
  for (u64 k = 1; k <= 4000; ++k) e.update(k, 3);
  for (u64 k = 1; k <= 2000; ++k) e.update(k, -3); // deleted
  for (u64 k = 2001; k <= 3000; ++k) e.update(k, -5); // now negative
  const double est = e.estimate();
  EXPECT_GE(est, 0.95 * 2000);
  EXPECT_LE(est, 1.55 * 2000);
  for (u64 k = 2001; k <= 4000; ++k) e.update(k, k <= 3000 ? 2 : -3);
  EXPECT_EQ(e.estimate(), 0.0);
}

TEST(AmplifiedL0, MergeIsLinear) {
  auto a = make(), b = make(), ab = make();
  for (u64 k = 1; k <= 3000; ++k) {
    (k % 2 ? a : b).update(k * 7919, 1);
    ab.update(k * 7919, 1);
  }
  auto merged = a;
  merged.merge(b, +1);
  EXPECT_EQ(merged, ab);
  merged.merge(b, -1);
  EXPECT_EQ(merged, a);
  EXPECT_THROW(a.merge(make(8), +1), MergeError);
}

TEST(AmplifiedL0, RejectsBadParameters) {
  EXPECT_THROW(AmplifiedL0Estimator(0, 32, 1, kUniverse, 1.5), ConfigError);
  EXPECT_THROW(AmplifiedL0Estimator(4, 32, 1, kUniverse, 1.0), ConfigError);
}

TEST(L0Estimator, DispatchesAndGuardsKinds) {
  L0Estimator amp(make());
  L0Estimator exact(ExactL0Counter{});
  EXPECT_EQ(amp.kind(), L0Kind::Amplified);
  EXPECT_EQ(exact.kind(), L0Kind::Exact);
  exact.update(4, 1);
  exact.update(5, 1);
  EXPECT_EQ(exact.estimate(), 2.0);
  EXPECT_THROW(amp.merge(exact, +1), MergeError);
}
