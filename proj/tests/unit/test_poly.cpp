#include <gtest/gtest.h>

#include <random>

#include "tsketch/poly.hpp"

using namespace tsketch;

namespace {

poly::Poly random_poly(std::mt19937_64& rng, std::size_t n) {
  poly::Poly f(n);
  for (auto& c : f) c = rng() % field::kPrime;
  return f;
}

poly::Poly naive_multiply(const poly::Poly& a, const poly::Poly& b) {
  if (a.empty() || b.empty()) return {};
  poly::Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = field::add(out[i + j], field::mul(a[i], b[j]));
  }
  poly::normalize(out);
  return out;
}

poly::Poly naive_remainder(poly::Poly f, const poly::Poly& g) {
  const std::size_t dg = g.size() - 1;
  while (f.size() > dg) {
    const u64 lead = f.back();
    const std::size_t shift = f.size() - 1 - dg;
    for (std::size_t i = 0; i <= dg; ++i) f[shift + i] = field::sub(f[shift + i], field::mul(lead, g[i]));
    f.pop_back();
  }
  poly::normalize(f);
  return f;
}

} // namespace

TEST(Poly, MultiplyMatchesSchoolbookAcrossKaratsubaCutoff) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1, 2, 5, 31, 32, 33, 64, 100, 257}) {
    for (std::size_t m : {std::size_t{1}, n, n + 3}) {
      const auto a = random_poly(rng, n), b = random_poly(rng, m);
      auto got = poly::multiply(a, b);
      poly::normalize(got);
      EXPECT_EQ(got, naive_multiply(a, b)) << n << "x" << m;
    }
  }
}

TEST(Poly, RemainderMonicMatchesLongDivision) {
  std::mt19937_64 rng(2);
  for (std::size_t df : {0, 3, 16, 40, 127}) {
    for (std::size_t dg : {1, 2, 8, 33}) {
      const auto f = random_poly(rng, df + 1);
      auto g = random_poly(rng, dg);
      g.push_back(1);
      auto got = poly::remainder_monic(f, g);
      poly::normalize(got);
      EXPECT_EQ(got, naive_remainder(f, g)) << df << " mod " << dg;
    }
  }
}

TEST(Poly, RemainderAgreesWithEvaluationAtRoots) {
  // f mod (x - r) is the constant f(r).
  std::mt19937_64 rng(3);
  const auto f = random_poly(rng, 50);
  for (int i = 0; i < 20; ++i) {
    const u64 r = rng() % field::kPrime;
    const poly::Poly g = {field::neg(r), 1};
    auto rem = poly::remainder_monic(f, g);
    poly::normalize(rem);
    const u64 value = poly::evaluate(f, r);
    EXPECT_EQ(rem.empty() ? 0 : rem[0], value);
  }
}

TEST(Poly, NormalizeAndEvaluateEdges) {
  poly::Poly f = {1, 2, 0, 0};
  poly::normalize(f);
  EXPECT_EQ(f, (poly::Poly{1, 2}));
  poly::Poly zero = {0, 0};
  poly::normalize(zero);
  EXPECT_TRUE(zero.empty());
  EXPECT_EQ(poly::evaluate(zero, 5), 0u);
  EXPECT_EQ(poly::evaluate(f, 3), 7u);
}
