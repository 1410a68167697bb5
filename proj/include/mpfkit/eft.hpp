// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "mpfkit/config.hpp"

namespace mpfkit::eft {

// ---------------------------------------------------------------------------
// Error-free transformations, written once against an arithmetic policy.
//
// A policy supplies one rounded binary64-per-element number type plus the
// five rounded operations (add, sub, mul, neg, fused multiply-add) and the
// three branchy helpers that cannot be expressed branch-free (renorm5, vseb,
// merge6). DoubleOps below instantiates the scalar kernels; the SIMD module
// provides a 4-lane policy. Because both instantiate the same template, the
// packed kernels are lanewise bit-identical to the scalar ones by
// construction, not by test coverage alone.
// ---------------------------------------------------------------------------

template <class Ops>
struct Eft {
  using num = typename Ops::num;

  struct Pair {
    num s;  // rounded result
    num e;  // exact rounding error
  };

  struct Triple {
    num s;
    num e1;
    num e2;
  };

  // Knuth two-sum: s + e == a + b exactly, for any finite a, b whose sum
  // does not overflow. 6 ops, branch free.
  static Pair two_sum(num a, num b) {
    num s = Ops::add(a, b);
    num v = Ops::sub(s, a);
    num e = Ops::add(Ops::sub(a, Ops::sub(s, v)), Ops::sub(b, v));
    return {s, e};
  }

  // Dekker fast-two-sum: 3 ops, exact only when exponent(a) >= exponent(b)
  // or a == 0.
  static Pair quick_two_sum(num a, num b) {
    num s = Ops::add(a, b);
    num e = Ops::sub(b, Ops::sub(s, a));
    return {s, e};
  }

  // two-product via fma: s + e == a*b exactly whenever a*b does not
  // overflow and |a*b| >= 2^-969 (no error term underflow).
  static Pair two_prod(num a, num b) {
    num s = Ops::mul(a, b);
    num e = Ops::fma(a, b, Ops::neg(s));
    return {s, e};
  }

  // Dekker-split two-product; bit-identical to two_prod on the exactness
  // domain. Kept as an fma-free cross-check.
  static Pair two_prod_split(num a, num b) {
    const num f = Ops::splat(134217729.0);  // 2^27 + 1
    num s = Ops::mul(a, b);
    num ta = Ops::mul(f, a);
    num ha = Ops::sub(ta, Ops::sub(ta, a));
    num la = Ops::sub(a, ha);
    num tb = Ops::mul(f, b);
    num hb = Ops::sub(tb, Ops::sub(tb, b));
    num lb = Ops::sub(b, hb);
    num e = Ops::add(Ops::add(Ops::add(Ops::sub(Ops::mul(ha, hb), s), Ops::mul(ha, lb)),
                              Ops::mul(la, hb)),
                     Ops::mul(la, lb));
    return {s, e};
  }

  // three-sum: s + e1 + e2 == a + b + c exactly.
  static Triple three_sum(num a, num b, num c) {
    Pair t = two_sum(a, b);
    Pair u = two_sum(c, t.s);
    Pair v = two_sum(t.e, u.e);
    return {u.s, v.s, v.e};
  }

  // cheaper variant that rounds the two error terms into one.
  static Pair three_sum2(num a, num b, num c) {
    Pair t = two_sum(a, b);
    Pair u = two_sum(c, t.s);
    return {u.s, Ops::add(t.e, u.e)};
  }

  // distillation: out[0] + ... + out[N-1] == x[0] + ... + x[N-1] exactly,
  // with out[0] holding the rounded total. two_sum chain from the tail.
  template <std::size_t N>
  static void vec_sum(const num (&x)[N], num (&out)[N]) {
    static_assert(N >= 2, "vec_sum needs at least two terms");
    num s = x[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) {
      Pair p = two_sum(x[i], s);
      out[i + 1] = p.e;
      s = p.s;
    }
    out[0] = s;
  }
};

// ---------------------------------------------------------------------------
// Scalar policy and public scalar API.
// ---------------------------------------------------------------------------

struct DoubleOps {
  using num = double;
  static double splat(double v) { return v; }
  static double add(double a, double b) { return a + b; }
  static double sub(double a, double b) { return a - b; }
  static double mul(double a, double b) { return a * b; }
  static double neg(double a) { return -a; }
  static double fma(double a, double b, double c) { return std::fma(a, b, c); }

  static void renorm5(const double (&c)[5], double (&out)[4]);
  static void vseb(std::size_t k, const double* e, std::size_t n, double* out);
  static void merge6(const double (&x)[3], const double (&y)[3], double (&out)[6]);
};

using ScalarEft = Eft<DoubleOps>;

struct SumPair {
  double s;
  double e;
};

struct SumTriple {
  double s;
  double e1;
  double e2;
};

inline SumPair two_sum(double a, double b) {
  auto p = ScalarEft::two_sum(a, b);
  return {p.s, p.e};
}

inline SumPair quick_two_sum(double a, double b) {
  auto p = ScalarEft::quick_two_sum(a, b);
#if MPFKIT_CHECKED
  // The precondition is exactness, not literally |a| >= |b|: renormalization
  // chains legitimately pass a leading term carrying a few ulps of slack.
  // Checking against the branch-free two_sum accepts exactly those calls.
  if (std::isfinite(a) && std::isfinite(b)) {
    auto ref = ScalarEft::two_sum(a, b);
    MPFKIT_CHECK(p.s == ref.s && p.e == ref.e,
                 "quick_two_sum called outside its exactness domain");
  }
#endif
  return {p.s, p.e};
}

inline SumPair two_prod(double a, double b) {
  auto p = ScalarEft::two_prod(a, b);
  return {p.s, p.e};
}

inline SumPair two_prod_split(double a, double b) {
  auto p = ScalarEft::two_prod_split(a, b);
  return {p.s, p.e};
}

inline SumTriple three_sum(double a, double b, double c) {
  auto t = ScalarEft::three_sum(a, b, c);
  return {t.s, t.e1, t.e2};
}

inline SumPair three_sum2(double a, double b, double c) {
  auto p = ScalarEft::three_sum2(a, b, c);
  return {p.s, p.e};
}

// Span front-end for the distillation chain. n < 2 is a contract error.
inline void vec_sum(std::span<const double> x, std::span<double> out) {
  if (x.size() < 2) throw std::invalid_argument("vec_sum: need at least two terms");
  if (out.size() != x.size())
    throw std::invalid_argument("vec_sum: output length must match input");
  double s = x[x.size() - 1];
  for (std::size_t i = x.size() - 1; i-- > 0;) {
    auto p = ScalarEft::two_sum(x[i], s);
    out[i + 1] = p.e;
    s = p.s;
  }
  out[0] = s;
}

// VecSumErrBranch: compress an expansion e[0..n) (nonincreasing-magnitude
// error terms, e.g. a vec_sum output) to at most k components. A component
// is finalized only when the next fold leaves a nonzero residual; trailing
// slots are zero-filled, residuals beyond slot k-1 are discarded.
inline void vseb(std::span<const double> e, std::span<double> out) {
  const std::size_t n = e.size();
  const std::size_t k = out.size();
  if (k < 1) throw std::invalid_argument("vseb: need at least one output slot");
  if (n < k) throw std::invalid_argument("vseb: fewer inputs than output slots");
  for (std::size_t i = 0; i < k; ++i) out[i] = 0.0;
  std::size_t j = 0;
  double eps = e[0];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    auto p = ScalarEft::quick_two_sum(eps, e[i + 1]);
    out[j] = p.s;
    if (p.e != 0.0) {
      if (j >= k - 1) return;  // out of slots: drop the rest
      ++j;
      eps = p.e;
    } else {
      eps = p.s;  // slot j not final yet; keep folding into it
    }
  }
  if (eps != 0.0 && j < k) out[j] = eps;
}

// Merge two 3-term expansions into one 6-term sequence ordered by
// nonincreasing magnitude. Stable: on |x[i]| == |y[j]| the x element wins.
inline void merge_by_magnitude(const double (&x)[3], const double (&y)[3],
                               double (&out)[6]) {
  std::size_t i = 0, j = 0, k = 0;
  while (i < 3 && j < 3)
    out[k++] = std::fabs(x[i]) >= std::fabs(y[j]) ? x[i++] : y[j++];
  while (i < 3) out[k++] = x[i++];
  while (j < 3) out[k++] = y[j++];
}

// Renormalize a 5-term result of a quad-width kernel into 4 nonoverlapping
// components: a backward quick_two_sum sweep concentrates the value at the
// front, then a forward sweep re-emits components, skipping zeros.
inline std::array<double, 4> renorm5(double c0, double c1, double c2, double c3,
                                     double c4) {
  using E = ScalarEft;
  E::Pair p;
  double t;
  p = E::quick_two_sum(c3, c4), t = p.s, c4 = p.e;
  p = E::quick_two_sum(c2, t), t = p.s, c3 = p.e;
  p = E::quick_two_sum(c1, t), t = p.s, c2 = p.e;
  p = E::quick_two_sum(c0, t), c0 = p.s, c1 = p.e;

  double s0, s1, s2 = 0.0, s3 = 0.0;
  p = E::quick_two_sum(c0, c1), s0 = p.s, s1 = p.e;
  if (s1 != 0.0) {
    p = E::quick_two_sum(s1, c2), s1 = p.s, s2 = p.e;
    if (s2 != 0.0) {
      p = E::quick_two_sum(s2, c3), s2 = p.s, s3 = p.e;
      if (s3 != 0.0)
        s3 += c4;
      else
        s2 += c4;
    } else {
      p = E::quick_two_sum(s1, c3), s1 = p.s, s2 = p.e;
      if (s2 != 0.0) {
        p = E::quick_two_sum(s2, c4), s2 = p.s, s3 = p.e;
      } else {
        p = E::quick_two_sum(s1, c4), s1 = p.s, s2 = p.e;
      }
    }
  } else {
    p = E::quick_two_sum(s0, c2), s0 = p.s, s1 = p.e;
    if (s1 != 0.0) {
      p = E::quick_two_sum(s1, c3), s1 = p.s, s2 = p.e;
      if (s2 != 0.0) {
        p = E::quick_two_sum(s2, c4), s2 = p.s, s3 = p.e;
      } else {
        p = E::quick_two_sum(s1, c4), s1 = p.s, s2 = p.e;
      }
    } else {
      p = E::quick_two_sum(s0, c3), s0 = p.s, s1 = p.e;
      if (s1 != 0.0) {
        p = E::quick_two_sum(s1, c4), s1 = p.s, s2 = p.e;
      } else {
        p = E::quick_two_sum(s0, c4), s0 = p.s, s1 = p.e;
      }
    }
  }
  return {s0, s1, s2, s3};
}

// Scalar policy hooks for the branchy helpers.
inline void DoubleOps::renorm5(const double (&c)[5], double (&out)[4]) {
  auto r = eft::renorm5(c[0], c[1], c[2], c[3], c[4]);
  out[0] = r[0], out[1] = r[1], out[2] = r[2], out[3] = r[3];
}

inline void DoubleOps::vseb(std::size_t k, const double* e, std::size_t n,
                            double* out) {
  eft::vseb(std::span<const double>(e, n), std::span<double>(out, k));
}

inline void DoubleOps::merge6(const double (&x)[3], const double (&y)[3],
                              double (&out)[6]) {
  merge_by_magnitude(x, y, out);
}

}  // namespace mpfkit::eft
