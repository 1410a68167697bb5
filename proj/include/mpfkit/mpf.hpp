// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "mpfkit/eft.hpp"
#include "mpfkit/simd.hpp"

namespace mpfkit::mpf {

// ---------------------------------------------------------------------------
// Formats. A width-W value is an unevaluated sum c[0] + ... + c[W-1] of
// binary64 components, normalized so |c[i+1]| <= ulp(c[i]) (trailing zeros
// allowed). Width 2/3/4 give ~32/48/64 significant digits.
// ---------------------------------------------------------------------------

template <int W>
struct MultiDouble {
  static_assert(W >= 2 && W <= 4);
  double c[W];

  bool operator==(const MultiDouble&) const = default;
};

using Double2 = MultiDouble<2>;
using Double3 = MultiDouble<3>;
using Double4 = MultiDouble<4>;

// Four width-W values packed lanewise: comp[i] holds component i of all four
// values, so lane l across comp[0..W) is one scalar MultiDouble<W>.
template <int W>
struct PackedMulti {
  static_assert(W >= 2 && W <= 4);
  simd::LaneQuad comp[W];
};

using PackedD2 = PackedMulti<2>;
using PackedD3 = PackedMulti<3>;
using PackedD4 = PackedMulti<4>;

// Unit roundoff of the width-W format: 2^(-53W+afew), the scale against
// which kernel error bounds and digit-loss figures are quoted.
template <int W>
constexpr double format_eps() {
  if constexpr (W == 2) return 0x1p-104;
  if constexpr (W == 3) return 0x1p-157;
  return 0x1p-209;
}

inline double ulp(double x) {
  if (x == 0.0 || !std::isfinite(x)) return 0.0;
  return std::ldexp(1.0, std::ilogb(x) - 52);
}

template <int W>
inline bool is_normalized(const MultiDouble<W>& x) {
  for (int i = 0; i + 1 < W; ++i)
    if (std::fabs(x.c[i + 1]) > ulp(x.c[i])) return false;
  return true;
}

template <int W>
inline MultiDouble<W> from_f64(double v) {
  MultiDouble<W> r{};
  r.c[0] = v;
  return r;
}

// Collapse an arbitrary finite component list into a normalized width-W
// value: distill with vec_sum, then compress with vseb(W).
template <int W>
inline MultiDouble<W> renormalized(std::span<const double> parts) {
  MultiDouble<W> r{};
  if (parts.size() < 2) {
    if (parts.size() == 1) r.c[0] = parts[0];
    return r;
  }
  std::array<double, 16> dist;
  eft::vec_sum(parts, std::span<double>(dist.data(), parts.size()));
  eft::vseb(std::span<const double>(dist.data(), parts.size()),
            std::span<double>(r.c, W));
  return r;
}

// ---------------------------------------------------------------------------
// Width kernels over an arithmetic policy. Instantiated with DoubleOps for
// the scalar API and LaneOps<Tag> for the packed API, so the two are
// lanewise bit-identical by construction.
// ---------------------------------------------------------------------------

namespace detail {

template <class Ops>
struct Kernels {
  using num = typename Ops::num;
  using E = eft::Eft<Ops>;

  // ---- double-double -----------------------------------------------------

  static void dd_add(const num (&x)[2], const num (&y)[2], num (&r)[2]) {
    auto s = E::two_sum(x[0], y[0]);
    num w = Ops::add(x[1], y[1]);
    num e = Ops::add(s.e, w);
    auto q = E::quick_two_sum(s.s, e);
    r[0] = q.s, r[1] = q.e;
  }

  static void dd_mul(const num (&x)[2], const num (&y)[2], num (&r)[2]) {
    auto p = E::two_prod(x[0], y[0]);
    num w = Ops::add(Ops::mul(x[0], y[1]), Ops::mul(x[1], y[0]));
    num e = Ops::add(p.e, w);
    auto q = E::quick_two_sum(p.s, e);
    r[0] = q.s, r[1] = q.e;
  }

  // ---- triple-double -----------------------------------------------------

  // merge-based addition: magnitude-merge the six components, distill,
  // compress to three.
  static void td_add_merge(const num (&x)[3], const num (&y)[3], num (&r)[3]) {
    num z[6];
    Ops::merge6(x, y, z);
    num e[6];
    E::template vec_sum<6>(z, e);
    Ops::vseb(3, e, 6, r);
  }

  // through-quad addition: zero-extend, quad add, truncate. Branch-free,
  // and the default addition for triple-double throughout the library.
  static void td_add_q(const num (&x)[3], const num (&y)[3], num (&r)[3]) {
    const num z = Ops::splat(0.0);
    const num xx[4] = {x[0], x[1], x[2], z};
    const num yy[4] = {y[0], y[1], y[2], z};
    num rr[4];
    qd_add(xx, yy, rr);
    r[0] = rr[0], r[1] = rr[1], r[2] = rr[2];
  }

  // sloppy triple multiplication: exact order-0/1 partial products, fma
  // for the order-2 terms, one distill + compress.
  static void td_mul(const num (&x)[3], const num (&y)[3], num (&r)[3]) {
    auto z00 = E::two_prod(x[0], y[0]);
    auto z01 = E::two_prod(x[0], y[1]);
    auto z10 = E::two_prod(x[1], y[0]);
    num b[3];
    const num bin[3] = {z00.e, z01.s, z10.s};
    E::template vec_sum<3>(bin, b);
    num c = Ops::fma(x[1], y[1], b[2]);
    num z31 = Ops::fma(x[0], y[2], z10.e);
    num z32 = Ops::fma(x[2], y[0], z01.e);
    num z3 = Ops::add(z31, z32);
    num s3 = Ops::add(c, z3);
    num e[4];
    const num ein[4] = {z00.s, b[0], b[1], s3};
    E::template vec_sum<4>(ein, e);
    r[0] = e[0];
    Ops::vseb(2, e + 1, 3, r + 1);
  }

  // through-quad multiplication; kept for comparison benchmarks, not the
  // default (td_mul wins on speed at the same working accuracy).
  static void td_mul_q(const num (&x)[3], const num (&y)[3], num (&r)[3]) {
    const num z = Ops::splat(0.0);
    const num xx[4] = {x[0], x[1], x[2], z};
    const num yy[4] = {y[0], y[1], y[2], z};
    num rr[4];
    qd_mul(xx, yy, rr);
    r[0] = rr[0], r[1] = rr[1], r[2] = rr[2];
  }

  // ---- quad-double (sloppy) ----------------------------------------------

  static void qd_add(const num (&x)[4], const num (&y)[4], num (&r)[4]) {
    auto a0 = E::two_sum(x[0], y[0]);
    auto a1 = E::two_sum(x[1], y[1]);
    auto a2 = E::two_sum(x[2], y[2]);
    auto a3 = E::two_sum(x[3], y[3]);
    num s0 = a0.s, t0 = a0.e;
    num s1 = a1.s, t1 = a1.e;
    num s2 = a2.s, t2 = a2.e;
    num s3 = a3.s, t3 = a3.e;
    auto b = E::two_sum(s1, t0);
    s1 = b.s, t0 = b.e;
    auto c = E::three_sum(s2, t0, t1);
    s2 = c.s, t0 = c.e1, t1 = c.e2;
    auto d = E::three_sum2(s3, t0, t2);  // t2 fully absorbed here
    s3 = d.s, t0 = d.e;
    t0 = Ops::add(Ops::add(t0, t1), t3);
    const num in[5] = {s0, s1, s2, s3, t0};
    Ops::renorm5(in, r);
  }

  static void qd_mul(const num (&x)[4], const num (&y)[4], num (&r)[4]) {
    auto P0 = E::two_prod(x[0], y[0]);
    auto P1 = E::two_prod(x[0], y[1]);
    auto P2 = E::two_prod(x[1], y[0]);
    auto P3 = E::two_prod(x[0], y[2]);
    auto P4 = E::two_prod(x[1], y[1]);
    auto P5 = E::two_prod(x[2], y[0]);
    num p0 = P0.s, q0 = P0.e;
    num p1 = P1.s, q1 = P1.e;
    num p2 = P2.s, q2 = P2.e;
    num p3 = P3.s, q3 = P3.e;
    num p4 = P4.s, q4 = P4.e;
    num p5 = P5.s, q5 = P5.e;

    auto f1 = E::three_sum(p1, p2, q0);
    p1 = f1.s, p2 = f1.e1, q0 = f1.e2;
    // pre-combining the operand pairs that trade places under x<->y keeps
    // every fold order fixed, so multiplication stays bitwise commutative
    auto g = E::two_sum(q1, q2);
    auto f2 = E::three_sum(p2, g.s, g.e);
    p2 = f2.s, q1 = f2.e1, q2 = f2.e2;
    auto h = E::two_sum(p3, p5);
    auto f3 = E::three_sum(h.s, p4, h.e);
    p3 = f3.s, p4 = f3.e1, p5 = f3.e2;

    auto u = E::two_sum(p2, p3);
    num s0 = u.s, t0 = u.e;
    auto v = E::two_sum(q1, p4);
    num s1 = v.s, t1 = v.e;
    num s2 = Ops::add(q2, p5);
    auto w = E::two_sum(s1, t0);
    s1 = w.s, t0 = w.e;
    s2 = Ops::add(s2, Ops::add(t0, t1));
    s1 = Ops::add(s1, Ops::add(Ops::mul(x[0], y[3]), Ops::mul(x[3], y[0])));
    s1 = Ops::add(s1, Ops::add(Ops::mul(x[1], y[2]), Ops::mul(x[2], y[1])));
    s1 = Ops::add(s1, q0);
    s1 = Ops::add(s1, Ops::add(q3, q5));
    s1 = Ops::add(s1, q4);
    const num in[5] = {p0, p1, s0, s1, s2};
    Ops::renorm5(in, r);
  }

  // ---- width-generic entry points (library defaults) ---------------------

  template <int W>
  static void add(const num (&x)[W], const num (&y)[W], num (&r)[W]) {
    if constexpr (W == 2)
      dd_add(x, y, r);
    else if constexpr (W == 3)
      td_add_q(x, y, r);
    else
      qd_add(x, y, r);
  }

  template <int W>
  static void mul(const num (&x)[W], const num (&y)[W], num (&r)[W]) {
    if constexpr (W == 2)
      dd_mul(x, y, r);
    else if constexpr (W == 3)
      td_mul(x, y, r);
    else
      qd_mul(x, y, r);
  }

  template <int W>
  static void neg(const num (&x)[W], num (&r)[W]) {
    for (int i = 0; i < W; ++i) r[i] = Ops::neg(x[i]);
  }

  template <int W>
  static void sub(const num (&x)[W], const num (&y)[W], num (&r)[W]) {
    num ny[W];
    neg<W>(y, ny);
    add<W>(x, ny, r);
  }
};

using ScalarKernels = Kernels<eft::DoubleOps>;

template <class Tag>
using PackedKernels = Kernels<simd::LaneOps<Tag>>;

template <class F>
decltype(auto) with_backend(F&& f) {
  if (runtime::active_backend() == runtime::Backend::hardware)
    return f(simd::hw_tag{});
  return f(simd::portable_tag{});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalar API.
// ---------------------------------------------------------------------------

inline Double2 dd_add(const Double2& x, const Double2& y) {
  Double2 r;
  detail::ScalarKernels::dd_add(x.c, y.c, r.c);
  return r;
}

inline Double2 dd_mul(const Double2& x, const Double2& y) {
  Double2 r;
  detail::ScalarKernels::dd_mul(x.c, y.c, r.c);
  return r;
}

inline Double3 td_add_merge(const Double3& x, const Double3& y) {
  Double3 r;
  detail::ScalarKernels::td_add_merge(x.c, y.c, r.c);
  return r;
}

inline Double3 td_add_q(const Double3& x, const Double3& y) {
  Double3 r;
  detail::ScalarKernels::td_add_q(x.c, y.c, r.c);
  return r;
}

inline Double3 td_mul(const Double3& x, const Double3& y) {
  Double3 r;
  detail::ScalarKernels::td_mul(x.c, y.c, r.c);
  return r;
}

inline Double3 td_mul_q(const Double3& x, const Double3& y) {
  Double3 r;
  detail::ScalarKernels::td_mul_q(x.c, y.c, r.c);
  return r;
}

inline Double4 qd_add(const Double4& x, const Double4& y) {
  Double4 r;
  detail::ScalarKernels::qd_add(x.c, y.c, r.c);
  return r;
}

inline Double4 qd_mul(const Double4& x, const Double4& y) {
  Double4 r;
  detail::ScalarKernels::qd_mul(x.c, y.c, r.c);
  return r;
}

template <int W>
inline MultiDouble<W> add(const MultiDouble<W>& x, const MultiDouble<W>& y) {
  MultiDouble<W> r;
  detail::ScalarKernels::add<W>(x.c, y.c, r.c);
  return r;
}

template <int W>
inline MultiDouble<W> mul(const MultiDouble<W>& x, const MultiDouble<W>& y) {
  MultiDouble<W> r;
  detail::ScalarKernels::mul<W>(x.c, y.c, r.c);
  return r;
}

template <int W>
inline MultiDouble<W> neg(const MultiDouble<W>& x) {
  MultiDouble<W> r;
  detail::ScalarKernels::neg<W>(x.c, r.c);
  return r;
}

template <int W>
inline MultiDouble<W> sub(const MultiDouble<W>& x, const MultiDouble<W>& y) {
  MultiDouble<W> r;
  detail::ScalarKernels::sub<W>(x.c, y.c, r.c);
  return r;
}

// ---------------------------------------------------------------------------
// Packed API. The Tag forms bind a backend at compile time; the plain forms
// dispatch on runtime::active_backend().
// ---------------------------------------------------------------------------

template <int W>
inline PackedMulti<W> pack(const std::array<MultiDouble<W>, 4>& v) {
  PackedMulti<W> p;
  for (int w = 0; w < W; ++w)
    for (std::size_t l = 0; l < simd::lane_count; ++l)
      simd::set_lane(p.comp[w], l, v[l].c[w]);
  return p;
}

template <int W>
inline std::array<MultiDouble<W>, 4> unpack(const PackedMulti<W>& p) {
  std::array<MultiDouble<W>, 4> v;
  for (int w = 0; w < W; ++w)
    for (std::size_t l = 0; l < simd::lane_count; ++l)
      v[l].c[w] = simd::get_lane(p.comp[w], l);
  return v;
}

#define MPFKIT_PACKED_BINOP(NAME, WIDTH)                                      \
  template <class Tag>                                                        \
  inline PackedMulti<WIDTH> NAME(const PackedMulti<WIDTH>& x,                 \
                                 const PackedMulti<WIDTH>& y) {               \
    PackedMulti<WIDTH> r;                                                     \
    detail::PackedKernels<Tag>::NAME(x.comp, y.comp, r.comp);                 \
    return r;                                                                 \
  }                                                                           \
  inline PackedMulti<WIDTH> NAME(const PackedMulti<WIDTH>& x,                 \
                                 const PackedMulti<WIDTH>& y) {               \
    return detail::with_backend(                                              \
        [&](auto tag) { return NAME<decltype(tag)>(x, y); });                 \
  }

MPFKIT_PACKED_BINOP(dd_add, 2)
MPFKIT_PACKED_BINOP(dd_mul, 2)
MPFKIT_PACKED_BINOP(td_add_merge, 3)
MPFKIT_PACKED_BINOP(td_add_q, 3)
MPFKIT_PACKED_BINOP(td_mul, 3)
MPFKIT_PACKED_BINOP(td_mul_q, 3)
MPFKIT_PACKED_BINOP(qd_add, 4)
MPFKIT_PACKED_BINOP(qd_mul, 4)

#undef MPFKIT_PACKED_BINOP

template <class Tag, int W>
inline PackedMulti<W> add(const PackedMulti<W>& x, const PackedMulti<W>& y) {
  PackedMulti<W> r;
  detail::PackedKernels<Tag>::template add<W>(x.comp, y.comp, r.comp);
  return r;
}

template <class Tag, int W>
inline PackedMulti<W> mul(const PackedMulti<W>& x, const PackedMulti<W>& y) {
  PackedMulti<W> r;
  detail::PackedKernels<Tag>::template mul<W>(x.comp, y.comp, r.comp);
  return r;
}

template <int W>
inline PackedMulti<W> add(const PackedMulti<W>& x, const PackedMulti<W>& y) {
  return detail::with_backend([&](auto tag) { return add<decltype(tag), W>(x, y); });
}

template <int W>
inline PackedMulti<W> mul(const PackedMulti<W>& x, const PackedMulti<W>& y) {
  return detail::with_backend([&](auto tag) { return mul<decltype(tag), W>(x, y); });
}

}  // namespace mpfkit::mpf
