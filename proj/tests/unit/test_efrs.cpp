#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "tsketch/efrs.hpp"
#include "tsketch/errors.hpp"

using namespace tsketch;

namespace {

constexpr u64 kUniverse = u64{1} << 32;

std::map<u64, i64> random_totals(std::mt19937_64& rng, std::size_t n, bool allow_negative) {
  std::map<u64, i64> totals;
  while (totals.size() < n) {
    i64 c = static_cast<i64>(rng() % 20 + 1);
    if (allow_negative && rng() % 2) c = -c;
    totals[rng() % (kUniverse - 1) + 1] = c;
  }
  return totals;
}

// Values left after repeatedly deleting any value alone in one of its bins.
std::set<u64> fail_set(const std::map<u64, std::pair<u64, u64>>& bins) {
  std::set<u64> alive;
  for (const auto& [k, b] : bins) alive.insert(k);
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<u64, int> load1, load2;
    for (u64 k : alive) {
      ++load1[bins.at(k).first];
      ++load2[bins.at(k).second];
    }
    for (auto it = alive.begin(); it != alive.end();) {
      const auto [b1, b2] = bins.at(*it);
      if (load1[b1] == 1 || load2[b2] == 1) {
        it = alive.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  return alive;
}

} // namespace

TEST(EfrsParams, SizesFollowCapacityAndDelta) {
  const auto p = EfrsParams::for_capacity(StreamModel::NonStrict, 448, 0.1, kUniverse);
  EXPECT_EQ(p.array_size, 4u * 448u);
  EXPECT_EQ(p.independence, 32u);
  EXPECT_EQ(p.guard_range, static_cast<u64>(std::ceil(4 * 448 / 0.1)));
  const auto big = EfrsParams::for_capacity(StreamModel::Strict, u64{1} << 20, 1e-6, kUniverse);
  const auto t = static_cast<std::size_t>(std::ceil(2 * std::log2((1 << 20) / 1e-6)));
  EXPECT_EQ(big.independence, t + t % 2);
  EXPECT_EQ(big.guard_range, 0u);
}

TEST(EfrsLayout, RequiresGuardInNonStrictMode) {
  EfrsParams p{StreamModel::NonStrict, 16, 4, 100, kUniverse};
  EXPECT_THROW(EfrsLayout(p, make_hash(1, 4, 16), make_hash(2, 4, 16), std::nullopt), ConfigError);
  EXPECT_THROW(EfrsLayout(p, make_hash(1, 4, 16), make_hash(2, 4, 16), make_hash(3, 4, 99)), ConfigError);
  EXPECT_THROW(EfrsLayout(p, make_hash(1, 4, 15), make_hash(2, 4, 16), make_hash(3, 4, 100)), ConfigError);
  EXPECT_NO_THROW(EfrsLayout(p, make_hash(1, 4, 16), make_hash(2, 4, 16), make_hash(3, 4, 100)));
}

TEST(Efrs, RecoversAlmostEverythingWithExactTotals) {
  std::mt19937_64 rng(31);
  for (StreamModel mode : {StreamModel::Strict, StreamModel::NonStrict}) {
    const auto params = EfrsParams::for_capacity(mode, 300, 0.1, kUniverse);
    for (int trial = 0; trial < 10; ++trial) {
      auto layout = std::make_shared<const EfrsLayout>(params, 500 + trial);
      Efrs e(layout);
      const auto totals = random_totals(rng, 300, mode == StreamModel::NonStrict);
      for (const auto& [k, c] : totals) {
        e.insert(k, c + 3);
        e.insert(k, -3);
      }
      const auto r = e.recover();
      EXPECT_EQ(r.flagged_bins, 0u);
      EXPECT_EQ(r.duplicates, 0u);
      EXPECT_GE(r.entries.size(), 270u);
      for (const auto& entry : r.entries) {
        ASSERT_TRUE(totals.contains(entry.value));
        EXPECT_EQ(entry.count, totals.at(entry.value));
      }
    }
  }
}

TEST(Efrs, PeelsExactlyTheComplementOfTheFailSet) {
  std::mt19937_64 rng(32);
  EfrsParams p{StreamModel::Strict, 16, 8, 0, kUniverse};
  for (int trial = 0; trial < 200; ++trial) {
    auto layout = std::make_shared<const EfrsLayout>(p, 7000 + trial);
    Efrs e(layout);
    const auto totals = random_totals(rng, rng() % 30 + 1, false);
    std::map<u64, std::pair<u64, u64>> bins;
    for (const auto& [k, c] : totals) {
      e.insert(k, c);
      bins[k] = {layout->hash(0)(k), layout->hash(1)(k)};
    }
    const auto stuck = fail_set(bins);
    const auto r = e.recover();
    std::set<u64> got;
    for (const auto& entry : r.entries) got.insert(entry.value);
    std::set<u64> want;
    for (const auto& [k, c] : totals) {
      if (!stuck.contains(k)) want.insert(k);
    }
    EXPECT_EQ(got, want);
    EXPECT_EQ(r.residual_bins == 0, stuck.empty());
  }
}

TEST(Efrs, TwoValuesSharingBothBinsStayBehind) {
  EfrsParams p{StreamModel::Strict, 8, 2, 0, kUniverse};
  auto layout = std::make_shared<const EfrsLayout>(p, HashFn({3, 0}, 8), HashFn({5, 0}, 8), std::nullopt);
  Efrs e(layout);
  e.insert(10, 2);
  auto r = e.recover();
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0], (SampleEntry{10, 2}));
  e.insert(20, 1);
  r = e.recover();
  EXPECT_TRUE(r.entries.empty());
  EXPECT_EQ(r.residual_bins, 2u);
}

TEST(Efrs, LocatorPointsAtTwinBin) {
  auto layout = std::make_shared<const EfrsLayout>(EfrsParams::for_capacity(StreamModel::Strict, 50, 0.1, kUniverse), 4);
  Efrs e(layout);
  e.insert(123456, 3);
  const u64 b1 = layout->hash(0)(123456), b2 = layout->hash(1)(123456);
  EXPECT_EQ(e.locator(0, b1), 3 * static_cast<i128>(b2));
  EXPECT_EQ(e.locator(1, b2), 3 * static_cast<i128>(b1));
  EXPECT_EQ(e.classify(0, b1), CellVerdict::single(123456, 3));
}

TEST(Efrs, CorruptLocatorIsFlagged) {
  EfrsParams p{StreamModel::Strict, 8, 2, 0, kUniverse};
  auto layout = std::make_shared<const EfrsLayout>(p, HashFn({3, 0}, 8), HashFn({5, 0}, 8), std::nullopt);
  Efrs e(layout);
  e.insert(10, 2);
  e.strict_cells()[3].w += 1; // no longer divisible by the count
  e.strict_cells()[8 + 5].w = 2 * 100; // points past the array
  const auto r = e.recover();
  EXPECT_EQ(r.flagged_bins, 2u);
  EXPECT_TRUE(r.entries.empty());
}

TEST(Efrs, MergeAndDifference) {
  auto layout = std::make_shared<const EfrsLayout>(EfrsParams::for_capacity(StreamModel::NonStrict, 50, 0.1, kUniverse), 6);
  Efrs a(layout), b(layout), ab(layout);
  for (u64 k = 1; k <= 40; ++k) {
    (k % 2 ? a : b).insert(k * 977, -static_cast<i64>(k));
    ab.insert(k * 977, -static_cast<i64>(k));
  }
  auto sum = a;
  sum.merge(b, +1);
  EXPECT_EQ(sum, ab);
  sum.merge(ab, -1);
  EXPECT_TRUE(sum.is_zero());
  EXPECT_TRUE(sum.recover().entries.empty());
  auto other = std::make_shared<const EfrsLayout>(EfrsParams::for_capacity(StreamModel::NonStrict, 50, 0.1, kUniverse), 7);
  EXPECT_THROW(a.merge(Efrs(other), +1), MergeError);
}
