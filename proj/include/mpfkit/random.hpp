// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

#include "mpfkit/mpf.hpp"

namespace mpfkit::rng {

// SplitMix64: tiny, fast, and fully reproducible across platforms; all
// randomized data in the library and benchmarks flows from explicit seeds
// through this generator.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1p-53; }

  // uniform in [1, 2)
  double next_mantissa() { return 1.0 + next_unit(); }

  double next_signed_unit() {
    const std::uint64_t bits = next();
    const double u = static_cast<double>(bits >> 11) * 0x1p-53;
    return (bits & 1) != 0 ? -u : u;
  }
};

// Random finite double sign*m*2^e with m in [1,2) and e uniform in
// [min_exp, max_exp]; keeps EFT inputs inside their exactness domains.
inline double random_finite(SplitMix64& g, int min_exp, int max_exp) {
  const int span = max_exp - min_exp + 1;
  const int e = min_exp + static_cast<int>(g.next() % static_cast<std::uint64_t>(span));
  const double m = g.next_mantissa();
  return ((g.next() & 1) != 0 ? -m : m) * std::ldexp(1.0, e);
}

// Random normalized width-W value with leading component in [1, 2) and
// full-entropy tails near 2^(-53 i): draw raw components at descending
// scales, then renormalize so the result is a valid format member.
template <int W>
inline mpf::MultiDouble<W> random_normalized(SplitMix64& g) {
  double raw[W];
  raw[0] = g.next_mantissa();
  for (int i = 1; i < W; ++i)
    raw[i] = g.next_signed_unit() * std::ldexp(1.0, -53 * i);
  for (int guard = 0; guard < 64; ++guard) {
    const auto r = mpf::renormalized<W>(std::span<const double>(raw, W));
    if (r.c[0] >= 1.0 && r.c[0] < 2.0) return r;
    // tail nudged the lead out of [1,2): redraw the lead, keep the tails
    raw[0] = g.next_mantissa();
  }
  return mpf::from_f64<W>(1.0);  // unreachable in practice
}

// As above with a random overall sign.
template <int W>
inline mpf::MultiDouble<W> random_normalized_signed(SplitMix64& g) {
  auto r = random_normalized<W>(g);
  if ((g.next() & 1) != 0) r = mpf::neg(r);
  return r;
}

}  // namespace mpfkit::rng
