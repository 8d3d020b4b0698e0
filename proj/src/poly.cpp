#include "tsketch/poly.hpp"

#include <algorithm>

namespace tsketch::poly {

namespace {

// Products of reduced operands are < 2^122, so up to 32 of them fit in a u128
// accumulator before a reduction is needed.
constexpr std::size_t kLazyTerms = 32;
constexpr std::size_t kKaratsubaCutoff = 32;

void schoolbook(std::span<const u64> a, std::span<const u64> b, std::span<u64> out) {
  const std::size_t n = a.size() + b.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= b.size() ? k - b.size() + 1 : 0;
    const std::size_t hi = std::min(k, a.size() - 1);
    u128 acc = 0;
    std::size_t pending = 0;
    u64 sum = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
      acc += static_cast<u128>(a[i]) * b[k - i];
      if (++pending == kLazyTerms) {
        sum = field::add(sum, field::reduce_wide(acc));
        acc = 0;
        pending = 0;
      }
    }
    out[k] = field::add(sum, field::reduce_wide(acc));
  }
}

void add_into(std::span<u64> dst, std::span<const u64> src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = field::add(dst[i], src[i]);
}

void sub_into(std::span<u64> dst, std::span<const u64> src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = field::sub(dst[i], src[i]);
}

// out has a.size() + b.size() - 1 slots.
void karatsuba(std::span<const u64> a, std::span<const u64> b, std::span<u64> out) {
  if (a.size() < kKaratsubaCutoff || b.size() < kKaratsubaCutoff) {
    schoolbook(a, b, out);
    return;
  }
  const std::size_t half = std::max(a.size(), b.size()) / 2;
  if (a.size() <= half || b.size() <= half) {
    // Unbalanced operands: split only the longer one.
    auto longer = a.size() > b.size() ? a : b;
    auto shorter = a.size() > b.size() ? b : a;
    std::fill(out.begin(), out.end(), 0);
    std::vector<u64> part(shorter.size() + half - 1);
    for (std::size_t off = 0; off < longer.size(); off += half) {
      auto chunk = longer.subspan(off, std::min(half, longer.size() - off));
      part.resize(chunk.size() + shorter.size() - 1);
      karatsuba(chunk, shorter, part);
      add_into(out.subspan(off, part.size()), part);
    }
    return;
  }

  auto a0 = a.first(half), a1 = a.subspan(half);
  auto b0 = b.first(half), b1 = b.subspan(half);

  std::vector<u64> z0(a0.size() + b0.size() - 1);
  std::vector<u64> z2(a1.size() + b1.size() - 1);
  karatsuba(a0, b0, z0);
  karatsuba(a1, b1, z2);

  std::vector<u64> sa(std::max(a0.size(), a1.size()), 0), sb(std::max(b0.size(), b1.size()), 0);
  add_into(sa, a0);
  add_into(sa, a1);
  add_into(sb, b0);
  add_into(sb, b1);
  std::vector<u64> z1(sa.size() + sb.size() - 1);
  karatsuba(sa, sb, z1);
  sub_into(z1, z0);
  sub_into(z1, z2);

  std::fill(out.begin(), out.end(), 0);
  add_into(out, z0);
  add_into(out.subspan(half), std::span<const u64>(z1).first(std::min(z1.size(), out.size() - half)));
  add_into(out.subspan(2 * half), z2);
}

} // namespace

void normalize(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly multiply(std::span<const u64> a, std::span<const u64> b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1);
  karatsuba(a, b, out);
  normalize(out);
  return out;
}

Poly remainder_monic(std::span<const u64> f, std::span<const u64> g) {
  const std::size_t d = g.size() - 1;
  if (f.size() <= d) return Poly(f.begin(), f.end());
  Poly r(f.begin(), f.end());
  for (std::size_t i = r.size() - 1; i >= d; --i) {
    const u64 q = r[i];
    if (q != 0) {
      u64* base = r.data() + (i - d);
      for (std::size_t j = 0; j < d; ++j) base[j] = field::sub(base[j], field::mul(q, g[j]));
    }
    r[i] = 0;
    if (i == d) break;
  }
  r.resize(d);
  return r;
}

u64 evaluate(std::span<const u64> f, u64 x) noexcept {
  u64 acc = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = field::add(field::mul(acc, x), *it);
  return acc;
}

} // namespace tsketch::poly
