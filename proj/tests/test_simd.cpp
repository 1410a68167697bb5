// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>

#include "mpfkit/eft.hpp"
#include "mpfkit/random.hpp"
#include "mpfkit/simd.hpp"

using namespace mpfkit;
using simd::hw_tag;
using simd::LaneQuad;
using simd::portable_tag;

namespace {

LaneQuad quad(double a, double b, double c, double d) {
  return simd::from_array({a, b, c, d});
}

LaneQuad random_quad(rng::SplitMix64& g, int lo, int hi) {
  LaneQuad q;
  for (std::size_t l = 0; l < 4; ++l)
    simd::set_lane(q, l, rng::random_finite(g, lo, hi));
  return q;
}

}  // namespace

// Runs first in this binary, before anything else resolves the backend.
TEST_CASE("MPFKIT_FORCE_PORTABLE wins the initial backend resolution") {
  setenv("MPFKIT_FORCE_PORTABLE", "1", 1);
  CHECK(runtime::active_backend() == runtime::Backend::portable);
  unsetenv("MPFKIT_FORCE_PORTABLE");
  // hand the rest of the suite the natural backend
  runtime::force_backend(runtime::hardware_available()
                             ? runtime::Backend::hardware
                             : runtime::Backend::portable);
}

TEST_CASE("lane accessors round-trip") {
  const LaneQuad q = quad(1, 2, 3, 4);
  CHECK(simd::to_array(q) == std::array<double, 4>{1, 2, 3, 4});
  CHECK(simd::get_lane(q, 2) == 3.0);
  CHECK(simd::bits_equal(q, q));
  CHECK(!simd::bits_equal(q, quad(1, 2, 3, 5)));
}

TEST_CASE_TEMPLATE("elementwise lane ops frozen cases", Tag, hw_tag, portable_tag) {
  const LaneQuad a = quad(1, 2, 3, 4);
  const LaneQuad b = quad(4, 3, 2, 1);
  CHECK(simd::to_array(simd::lq_add<Tag>(a, b)) == std::array<double, 4>{5, 5, 5, 5});
  CHECK(simd::bits_equal(simd::lq_mul<Tag>(simd::lq_splat<Tag>(1.0), a), a));
  CHECK(simd::to_array(simd::lq_sub<Tag>(a, a)) == std::array<double, 4>{0, 0, 0, 0});

  const LaneQuad ones = simd::lq_splat<Tag>(1.0);
  const LaneQuad zero = simd::lq_splat<Tag>(0.0);
  CHECK(simd::to_array(simd::lq_fma<Tag>(ones, ones, zero)) ==
        std::array<double, 4>{1, 1, 1, 1});
  // c = -a*b exactly cancels
  const LaneQuad c = simd::lq_neg<Tag>(simd::lq_mul<Tag>(a, b));
  CHECK(simd::to_array(simd::lq_fma<Tag>(a, b, c)) == std::array<double, 4>{0, 0, 0, 0});
}

TEST_CASE_TEMPLATE("aligned load/store round-trip and padded tails", Tag, hw_tag,
                   portable_tag) {
  alignas(32) double plane[8] = {1, 2, 3, 4, 7, 7, 0, 0};
  const LaneQuad q = simd::lq_load_aligned<Tag>(plane, 0);
  CHECK(simd::to_array(q) == std::array<double, 4>{1, 2, 3, 4});
  const LaneQuad tail = simd::lq_load_aligned<Tag>(plane, 4);
  CHECK(simd::to_array(tail) == std::array<double, 4>{7, 7, 0, 0});
  simd::lq_store_aligned<Tag>(plane, 4, q);
  CHECK(plane[4] == 1.0);
  CHECK(plane[7] == 4.0);
#if MPFKIT_CHECKED
  CHECK_THROWS_AS(simd::lq_load_aligned<Tag>(plane, 3), std::invalid_argument);
  CHECK_THROWS_AS(simd::lq_store_aligned<Tag>(plane, 2, q), std::invalid_argument);
#endif
}

TEST_CASE_TEMPLATE("lifted EFTs are lanewise bit-identical to scalar", Tag, hw_tag,
                   portable_tag) {
  rng::SplitMix64 g(31);
  for (int rep = 0; rep < 10000; ++rep) {
    const LaneQuad a = random_quad(g, -400, 400);
    const LaneQuad b = random_quad(g, -400, 400);

    const auto s = simd::simd_two_sum<Tag>(a, b);
    const auto p = simd::simd_two_prod<Tag>(a, b);
    for (std::size_t l = 0; l < 4; ++l) {
      const auto sr = eft::two_sum(simd::get_lane(a, l), simd::get_lane(b, l));
      REQUIRE(simd::get_lane(s.s, l) == sr.s);
      REQUIRE(simd::get_lane(s.e, l) == sr.e);
      const auto pr = eft::two_prod(simd::get_lane(a, l), simd::get_lane(b, l));
      REQUIRE(simd::get_lane(p.s, l) == pr.s);
      REQUIRE(simd::get_lane(p.e, l) == pr.e);
    }

    // quick_two_sum wants magnitude-ordered lanes
    LaneQuad hi = a, lo = b;
    for (std::size_t l = 0; l < 4; ++l) {
      double x = simd::get_lane(a, l), y = simd::get_lane(b, l);
      if (std::fabs(y) > std::fabs(x)) std::swap(x, y);
      simd::set_lane(hi, l, x);
      simd::set_lane(lo, l, y);
    }
    const auto q = simd::simd_quick_two_sum<Tag>(hi, lo);
    for (std::size_t l = 0; l < 4; ++l) {
      const auto qr =
          eft::quick_two_sum(simd::get_lane(hi, l), simd::get_lane(lo, l));
      REQUIRE(simd::get_lane(q.s, l) == qr.s);
      REQUIRE(simd::get_lane(q.e, l) == qr.e);
    }
  }
}

TEST_CASE("all-zero lanes stay zero through lifted ops") {
  const LaneQuad z = simd::lq_splat<portable_tag>(0.0);
  const auto s = simd::simd_two_sum(z, z);
  CHECK(simd::to_array(s.s) == std::array<double, 4>{0, 0, 0, 0});
  CHECK(simd::to_array(s.e) == std::array<double, 4>{0, 0, 0, 0});
  const auto p = simd::simd_two_prod(z, z);
  CHECK(simd::to_array(p.s) == std::array<double, 4>{0, 0, 0, 0});
}

TEST_CASE("runtime dispatch honors force_backend") {
  rng::SplitMix64 g(32);
  const LaneQuad a = random_quad(g, -100, 100);
  const LaneQuad b = random_quad(g, -100, 100);

  runtime::force_backend(runtime::Backend::portable);
  const auto sp = simd::simd_two_sum(a, b);
  runtime::force_backend(runtime::hardware_available()
                             ? runtime::Backend::hardware
                             : runtime::Backend::portable);
  const auto sh = simd::simd_two_sum(a, b);
  CHECK(simd::bits_equal(sp.s, sh.s));
  CHECK(simd::bits_equal(sp.e, sh.e));
}

TEST_CASE("hardware availability is reported consistently") {
  if (!runtime::hardware_compiled()) CHECK(!runtime::hardware_available());
  // informational either way; both backends must agree bitwise regardless
  rng::SplitMix64 g(33);
  for (int rep = 0; rep < 1000; ++rep) {
    const LaneQuad a = random_quad(g, -300, 300);
    const LaneQuad b = random_quad(g, -300, 300);
    CHECK(simd::bits_equal(simd::lq_add<hw_tag>(a, b), simd::lq_add<portable_tag>(a, b)));
    CHECK(simd::bits_equal(simd::lq_mul<hw_tag>(a, b), simd::lq_mul<portable_tag>(a, b)));
    CHECK(simd::bits_equal(simd::lq_sub<hw_tag>(a, b), simd::lq_sub<portable_tag>(a, b)));
    const LaneQuad c = random_quad(g, -300, 300);
    CHECK(simd::bits_equal(simd::lq_fma<hw_tag>(a, b, c),
                           simd::lq_fma<portable_tag>(a, b, c)));
  }
}
