// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>

#include "mpfkit/config.hpp"
#include "mpfkit/eft.hpp"
#include "mpfkit/runtime.hpp"

#if MPFKIT_HAVE_AVX2
#include <immintrin.h>
#endif

namespace mpfkit::simd {

inline constexpr std::size_t lane_count = 4;

// One 4-wide register of binary64 lanes. Lanes are independent scalar
// channels: every lifted operation must produce, in lane l, the exact bits
// the scalar kernel produces on lane l's inputs.
#if MPFKIT_HAVE_AVX2
struct LaneQuad {
  __m256d v;
};

inline double get_lane(const LaneQuad& q, std::size_t l) { return q.v[l]; }
inline void set_lane(LaneQuad& q, std::size_t l, double x) { q.v[l] = x; }
#else
struct alignas(32) LaneQuad {
  double v[4];
};

inline double get_lane(const LaneQuad& q, std::size_t l) { return q.v[l]; }
inline void set_lane(LaneQuad& q, std::size_t l, double x) { q.v[l] = x; }
#endif

inline LaneQuad from_array(const std::array<double, 4>& a) {
  LaneQuad q;
  for (std::size_t l = 0; l < lane_count; ++l) set_lane(q, l, a[l]);
  return q;
}

inline std::array<double, 4> to_array(const LaneQuad& q) {
  std::array<double, 4> a;
  for (std::size_t l = 0; l < lane_count; ++l) a[l] = get_lane(q, l);
  return a;
}

inline bool bits_equal(const LaneQuad& a, const LaneQuad& b) {
  for (std::size_t l = 0; l < lane_count; ++l) {
    const double x = get_lane(a, l), y = get_lane(b, l);
    if (!(x == y) && !(x != x && y != y)) return false;
    if (x == 0.0 && y == 0.0 && (1.0 / x) != (1.0 / y)) return false;
  }
  return true;
}

// Backend selection tags. hw_tag compiles to AVX2/FMA when available and
// silently degrades to the portable loops otherwise, so generic code can
// always instantiate both.
struct hw_tag {};
struct portable_tag {};

namespace detail {
// Branchy helpers shared by both policies: scalarize per lane. The scalar
// routine is the single source of truth, so lanewise bit-identity is free.
void lane_renorm5(const LaneQuad (&c)[5], LaneQuad (&out)[4]);
void lane_vseb(std::size_t k, const LaneQuad* e, std::size_t n, LaneQuad* out);
void lane_merge6(const LaneQuad (&x)[3], const LaneQuad (&y)[3], LaneQuad (&out)[6]);
}  // namespace detail

template <class Tag>
struct LaneOps;

template <>
struct LaneOps<portable_tag> {
  using num = LaneQuad;
  static LaneQuad splat(double x) {
    LaneQuad r;
    for (std::size_t l = 0; l < lane_count; ++l) set_lane(r, l, x);
    return r;
  }
  static LaneQuad add(const LaneQuad& a, const LaneQuad& b) {
    LaneQuad r;
    for (std::size_t l = 0; l < lane_count; ++l)
      set_lane(r, l, get_lane(a, l) + get_lane(b, l));
    return r;
  }
  static LaneQuad sub(const LaneQuad& a, const LaneQuad& b) {
    LaneQuad r;
    for (std::size_t l = 0; l < lane_count; ++l)
      set_lane(r, l, get_lane(a, l) - get_lane(b, l));
    return r;
  }
  static LaneQuad mul(const LaneQuad& a, const LaneQuad& b) {
    LaneQuad r;
    for (std::size_t l = 0; l < lane_count; ++l)
      set_lane(r, l, get_lane(a, l) * get_lane(b, l));
    return r;
  }
  static LaneQuad neg(const LaneQuad& a) {
    LaneQuad r;
    for (std::size_t l = 0; l < lane_count; ++l) set_lane(r, l, -get_lane(a, l));
    return r;
  }
  static LaneQuad fma(const LaneQuad& a, const LaneQuad& b, const LaneQuad& c) {
    LaneQuad r;
    for (std::size_t l = 0; l < lane_count; ++l)
      set_lane(r, l, std::fma(get_lane(a, l), get_lane(b, l), get_lane(c, l)));
    return r;
  }
  static void renorm5(const LaneQuad (&c)[5], LaneQuad (&out)[4]) {
    detail::lane_renorm5(c, out);
  }
  static void vseb(std::size_t k, const LaneQuad* e, std::size_t n, LaneQuad* out) {
    detail::lane_vseb(k, e, n, out);
  }
  static void merge6(const LaneQuad (&x)[3], const LaneQuad (&y)[3],
                     LaneQuad (&out)[6]) {
    detail::lane_merge6(x, y, out);
  }
};

#if MPFKIT_HAVE_AVX2
template <>
struct LaneOps<hw_tag> {
  using num = LaneQuad;
  static LaneQuad splat(double x) { return {_mm256_set1_pd(x)}; }
  static LaneQuad add(const LaneQuad& a, const LaneQuad& b) {
    return {_mm256_add_pd(a.v, b.v)};
  }
  static LaneQuad sub(const LaneQuad& a, const LaneQuad& b) {
    return {_mm256_sub_pd(a.v, b.v)};
  }
  static LaneQuad mul(const LaneQuad& a, const LaneQuad& b) {
    return {_mm256_mul_pd(a.v, b.v)};
  }
  static LaneQuad neg(const LaneQuad& a) {
    return {_mm256_sub_pd(_mm256_setzero_pd(), a.v)};
  }
  static LaneQuad fma(const LaneQuad& a, const LaneQuad& b, const LaneQuad& c) {
    return {_mm256_fmadd_pd(a.v, b.v, c.v)};
  }
  static void renorm5(const LaneQuad (&c)[5], LaneQuad (&out)[4]) {
    detail::lane_renorm5(c, out);
  }
  static void vseb(std::size_t k, const LaneQuad* e, std::size_t n, LaneQuad* out) {
    detail::lane_vseb(k, e, n, out);
  }
  static void merge6(const LaneQuad (&x)[3], const LaneQuad (&y)[3],
                     LaneQuad (&out)[6]) {
    detail::lane_merge6(x, y, out);
  }
};
#else
template <>
struct LaneOps<hw_tag> : LaneOps<portable_tag> {};
#endif

namespace detail {

inline void lane_renorm5(const LaneQuad (&c)[5], LaneQuad (&out)[4]) {
  for (std::size_t l = 0; l < lane_count; ++l) {
    const auto r = eft::renorm5(get_lane(c[0], l), get_lane(c[1], l),
                                get_lane(c[2], l), get_lane(c[3], l),
                                get_lane(c[4], l));
    for (std::size_t i = 0; i < 4; ++i) set_lane(out[i], l, r[i]);
  }
}

inline void lane_vseb(std::size_t k, const LaneQuad* e, std::size_t n,
                      LaneQuad* out) {
  double in[8], res[8];
  for (std::size_t l = 0; l < lane_count; ++l) {
    for (std::size_t i = 0; i < n; ++i) in[i] = get_lane(e[i], l);
    eft::vseb(std::span<const double>(in, n), std::span<double>(res, k));
    for (std::size_t i = 0; i < k; ++i) set_lane(out[i], l, res[i]);
  }
}

inline void lane_merge6(const LaneQuad (&x)[3], const LaneQuad (&y)[3],
                        LaneQuad (&out)[6]) {
  for (std::size_t l = 0; l < lane_count; ++l) {
    const double xs[3] = {get_lane(x[0], l), get_lane(x[1], l), get_lane(x[2], l)};
    const double ys[3] = {get_lane(y[0], l), get_lane(y[1], l), get_lane(y[2], l)};
    double zs[6];
    eft::merge_by_magnitude(xs, ys, zs);
    for (std::size_t i = 0; i < 6; ++i) set_lane(out[i], l, zs[i]);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Aligned quad load/store. `plane` must be 32-byte aligned and `offset` a
// multiple of four; checked builds validate, release builds assume.
// ---------------------------------------------------------------------------

template <class Tag>
inline LaneQuad lq_load_aligned(const double* plane, std::size_t offset) {
  MPFKIT_CHECK(offset % lane_count == 0, "lq_load_aligned: offset not a multiple of 4");
  MPFKIT_CHECK(reinterpret_cast<uintptr_t>(plane) % 32 == 0,
               "lq_load_aligned: plane not 32-byte aligned");
#if MPFKIT_HAVE_AVX2
  if constexpr (std::is_same_v<Tag, hw_tag>) return {_mm256_load_pd(plane + offset)};
#endif
  LaneQuad r;
  for (std::size_t l = 0; l < lane_count; ++l) set_lane(r, l, plane[offset + l]);
  return r;
}

template <class Tag>
inline void lq_store_aligned(double* plane, std::size_t offset, const LaneQuad& q) {
  MPFKIT_CHECK(offset % lane_count == 0, "lq_store_aligned: offset not a multiple of 4");
  MPFKIT_CHECK(reinterpret_cast<uintptr_t>(plane) % 32 == 0,
               "lq_store_aligned: plane not 32-byte aligned");
#if MPFKIT_HAVE_AVX2
  if constexpr (std::is_same_v<Tag, hw_tag>) {
    _mm256_store_pd(plane + offset, q.v);
    return;
  }
#endif
  for (std::size_t l = 0; l < lane_count; ++l) plane[offset + l] = get_lane(q, l);
}

// ---------------------------------------------------------------------------
// Lifted elementwise ops and error-free transformations.
// ---------------------------------------------------------------------------

struct LanePair {
  LaneQuad s;
  LaneQuad e;
};

template <class Tag> inline LaneQuad lq_splat(double x) { return LaneOps<Tag>::splat(x); }

// Broadcast one memory operand into all four lanes; the load/store data
// path's way of feeding a scalar into quad arithmetic.
template <class Tag>
inline LaneQuad lq_broadcast(const double* p) {
#if MPFKIT_HAVE_AVX2
  if constexpr (std::is_same_v<Tag, hw_tag>) return {_mm256_broadcast_sd(p)};
#endif
  return LaneOps<Tag>::splat(*p);
}
template <class Tag> inline LaneQuad lq_add(const LaneQuad& a, const LaneQuad& b) {
  return LaneOps<Tag>::add(a, b);
}
template <class Tag> inline LaneQuad lq_sub(const LaneQuad& a, const LaneQuad& b) {
  return LaneOps<Tag>::sub(a, b);
}
template <class Tag> inline LaneQuad lq_mul(const LaneQuad& a, const LaneQuad& b) {
  return LaneOps<Tag>::mul(a, b);
}
template <class Tag> inline LaneQuad lq_neg(const LaneQuad& a) {
  return LaneOps<Tag>::neg(a);
}
template <class Tag>
inline LaneQuad lq_fma(const LaneQuad& a, const LaneQuad& b, const LaneQuad& c) {
  return LaneOps<Tag>::fma(a, b, c);
}

template <class Tag>
inline LanePair simd_two_sum(const LaneQuad& a, const LaneQuad& b) {
  auto p = eft::Eft<LaneOps<Tag>>::two_sum(a, b);
  return {p.s, p.e};
}

template <class Tag>
inline LanePair simd_quick_two_sum(const LaneQuad& a, const LaneQuad& b) {
  auto p = eft::Eft<LaneOps<Tag>>::quick_two_sum(a, b);
  return {p.s, p.e};
}

template <class Tag>
inline LanePair simd_two_prod(const LaneQuad& a, const LaneQuad& b) {
  auto p = eft::Eft<LaneOps<Tag>>::two_prod(a, b);
  return {p.s, p.e};
}

// Runtime-dispatched forms; the backend is resolved per call, so use the
// Tag forms inside kernels and these at coarse boundaries or in tests.
inline LanePair simd_two_sum(const LaneQuad& a, const LaneQuad& b) {
  return runtime::active_backend() == runtime::Backend::hardware
             ? simd_two_sum<hw_tag>(a, b)
             : simd_two_sum<portable_tag>(a, b);
}

inline LanePair simd_quick_two_sum(const LaneQuad& a, const LaneQuad& b) {
  return runtime::active_backend() == runtime::Backend::hardware
             ? simd_quick_two_sum<hw_tag>(a, b)
             : simd_quick_two_sum<portable_tag>(a, b);
}

inline LanePair simd_two_prod(const LaneQuad& a, const LaneQuad& b) {
  return runtime::active_backend() == runtime::Backend::hardware
             ? simd_two_prod<hw_tag>(a, b)
             : simd_two_prod<portable_tag>(a, b);
}

}  // namespace mpfkit::simd
