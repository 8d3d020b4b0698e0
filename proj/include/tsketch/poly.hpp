#pragma once

// Dense univariate polynomials over GF(2^61 - 1), lowest degree first.
// Used by the subproduct tree in MultipointEvaluator.

#include <cstddef>
#include <span>
#include <vector>

#include "tsketch/field_hash.hpp"

namespace tsketch::poly {

using Poly = std::vector<u64>;

/// Drops leading zero coefficients; the zero polynomial becomes empty.
void normalize(Poly& f);

Poly multiply(std::span<const u64> a, std::span<const u64> b);

/// f mod g for monic g (deg g >= 1).
Poly remainder_monic(std::span<const u64> f, std::span<const u64> g);

u64 evaluate(std::span<const u64> f, u64 x) noexcept;

} // namespace tsketch::poly
