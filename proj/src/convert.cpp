// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mpfkit/convert.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace mpfkit::mpf {

using oracle::bigint;
using oracle::DyadicReal;

namespace {

bigint pow10(unsigned n) { return boost::multiprecision::pow(bigint(10), n); }

// Round-half-even integer division of nonnegative num by positive den.
bigint div_rn_even(const bigint& num, const bigint& den) {
  bigint q, r;
  boost::multiprecision::divide_qr(num, den, q, r);
  const bigint twice = r << 1;
  if (twice > den || (twice == den && boost::multiprecision::bit_test(q, 0)))
    ++q;
  return q;
}

struct ParsedDecimal {
  bool negative = false;
  bigint digits = 0;   // all significant digits as one integer
  long exp10 = 0;      // value = +-digits * 10^exp10
};

ParsedDecimal parse_decimal(std::string_view s) {
  ParsedDecimal out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto fail = [&] { throw std::invalid_argument("from_decimal_string: malformed number"); };

  if (n == 0) fail();
  if (s[i] == '+' || s[i] == '-') {
    out.negative = s[i] == '-';
    ++i;
  }
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
    out.digits = out.digits * 10 + (s[i] - '0');
    ++int_digits, ++i;
  }
  if (i < n && s[i] == '.') {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
      out.digits = out.digits * 10 + (s[i] - '0');
      ++frac_digits, ++i;
    }
  }
  if (int_digits + frac_digits == 0) fail();
  if (int_digits + frac_digits > 100000)
    throw std::invalid_argument("from_decimal_string: too many digits");
  long e = 0;
  if (i < n && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < n && (s[i] == '+' || s[i] == '-')) {
      eneg = s[i] == '-';
      ++i;
    }
    if (i >= n || !std::isdigit(static_cast<unsigned char>(s[i]))) fail();
    while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) {
      if (e < 10000000) e = e * 10 + (s[i] - '0');
      ++i;
    }
    if (eneg) e = -e;
  }
  if (i != n) fail();
  out.exp10 = e - static_cast<long>(frac_digits);
  return out;
}

}  // namespace

template <int W>
MultiDouble<W> from_decimal_string(std::string_view s) {
  const ParsedDecimal p = parse_decimal(s);
  MultiDouble<W> r{};
  if (p.digits.is_zero()) return r;

  const long ndigits =
      static_cast<long>(p.digits.str().size());  // decimal digit count
  if (p.exp10 + ndigits > 5000)
    throw std::range_error("from_decimal_string: value overflows binary64");
  if (p.exp10 + ndigits < -340) return r;  // far below half the least subnormal

  // exact rational num/den for |value|
  bigint num = p.digits;
  bigint den = 1;
  if (p.exp10 >= 0)
    num *= pow10(static_cast<unsigned>(p.exp10));
  else
    den = pow10(static_cast<unsigned>(-p.exp10));
  if (p.negative) num = -num;

  for (int i = 0; i < W; ++i) {
    if (num.is_zero()) break;
    const double v =
        oracle::o_div_to_binary64(DyadicReal(num, 0), DyadicReal(den, 0));
    r.c[i] = v;
    if (v == 0.0) break;  // remainder underflowed; cannot refine further
    // subtract v exactly: v = sig * 2^exp
    const DyadicReal dv = DyadicReal::from_double(v);
    const long e = dv.exponent();
    if (e >= 0) {
      num -= dv.significand() * (bigint(1) << static_cast<unsigned>(e)) * den;
    } else {
      num = (num << static_cast<unsigned>(-e)) - dv.significand() * den;
      den <<= static_cast<unsigned>(-e);
    }
  }
  return r;
}

template MultiDouble<2> from_decimal_string<2>(std::string_view);
template MultiDouble<3> from_decimal_string<3>(std::string_view);
template MultiDouble<4> from_decimal_string<4>(std::string_view);

std::string to_decimal_string(const DyadicReal& v, int digits) {
  if (digits < 1 || digits > 100000)
    throw std::invalid_argument("to_decimal_string: digit count out of range");
  if (v.is_zero()) return "0";

  using boost::multiprecision::abs;
  using boost::multiprecision::msb;
  const bigint mag = abs(v.significand());
  const long e2 = v.exponent();

  // first estimate of floor(log10 |v|), corrected below
  long d10 = static_cast<long>(
      std::floor((static_cast<double>(msb(mag)) + static_cast<double>(e2)) *
                 0.30102999566398120));

  const bigint lo = pow10(static_cast<unsigned>(digits - 1));
  const bigint hi = lo * 10;
  bigint q;
  for (int attempt = 0; attempt < 4; ++attempt) {
    // q = round(|v| * 10^(digits-1-d10))
    const long t = digits - 1 - d10;
    bigint num = mag;
    bigint den = 1;
    if (e2 >= 0)
      num <<= static_cast<unsigned>(e2);
    else
      den <<= static_cast<unsigned>(-e2);
    if (t >= 0)
      num *= pow10(static_cast<unsigned>(t));
    else
      den *= pow10(static_cast<unsigned>(-t));
    q = div_rn_even(num, den);
    if (q >= hi) {
      ++d10;
      continue;
    }
    if (q < lo) {
      --d10;
      continue;
    }
    break;
  }

  std::string ds = q.str();
  std::string out;
  if (v.sign() < 0) out += '-';
  out += ds[0];
  if (digits > 1) {
    out += '.';
    out += ds.substr(1);
  }
  out += 'e';
  if (d10 >= 0) out += '+';
  out += std::to_string(d10);
  return out;
}

}  // namespace mpfkit::mpf
