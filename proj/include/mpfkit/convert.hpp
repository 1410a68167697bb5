// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "mpfkit/mpf.hpp"
#include "mpfkit/oracle.hpp"

namespace mpfkit::mpf {

// Exact value of a multi-component number as a dyadic rational.
template <int W>
inline oracle::DyadicReal to_dyadic(const MultiDouble<W>& x) {
  return oracle::o_from_components(std::span<const double>(x.c, W));
}

// Output digit counts chosen so that to_decimal_string followed by
// from_decimal_string reproduces every normalized value bit-for-bit
// (the worst case needs 33/49/65 significant digits for W=2/3/4).
template <int W>
constexpr int default_decimal_digits() {
  if constexpr (W == 2) return 40;
  if constexpr (W == 3) return 56;
  return 72;
}

// Parse "[+-]ddd[.ddd][e[+-]dd]" to the nearest width-W value: each
// component is the correctly rounded remainder after subtracting the
// previous components exactly. Malformed input -> std::invalid_argument;
// values beyond binary64 range -> std::range_error (underflow returns 0).
template <int W>
MultiDouble<W> from_decimal_string(std::string_view s);

// Round-half-even decimal form "d.ddd...e[+-]dd" with exactly `digits`
// significant digits; the default round-trips.
std::string to_decimal_string(const oracle::DyadicReal& v, int digits);

template <int W>
std::string to_decimal_string(const MultiDouble<W>& x,
                              int digits = default_decimal_digits<W>()) {
  return to_decimal_string(to_dyadic(x), digits);
}

extern template MultiDouble<2> from_decimal_string<2>(std::string_view);
extern template MultiDouble<3> from_decimal_string<3>(std::string_view);
extern template MultiDouble<4> from_decimal_string<4>(std::string_view);

}  // namespace mpfkit::mpf
