// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mpfkit/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpfkit::oracle {

using boost::multiprecision::abs;
using boost::multiprecision::bit_test;
using boost::multiprecision::divide_qr;
using boost::multiprecision::lsb;
using boost::multiprecision::msb;

namespace {

constexpr std::size_t kMaxSignificandBits = 1000000;

std::size_t bit_length(const bigint& positive) { return msb(positive) + 1; }

// Round mag * 2^exp2 (mag > 0) to binary64 under round-to-nearest-even;
// sticky marks additional discarded nonzero tail strictly below mag's lsb.
double round_positive(const bigint& mag, long exp2, bool sticky) {
  const long bits = static_cast<long>(bit_length(mag));
  const long top = bits - 1 + exp2;  // floor(log2 value)
  if (top > 1024) throw std::range_error("oracle: value overflows binary64");

  long prec = 53;
  if (top < -1022) prec = 53 + (top + 1022);  // subnormal: may reach <= 0

  const long shift = bits - prec;
  double result;
  if (shift <= 0) {
    if (sticky)
      throw std::logic_error("oracle: sticky tail with exact-width significand");
    result = std::ldexp(static_cast<double>(mag.convert_to<unsigned long long>()),
                        static_cast<int>(exp2));
  } else {
    bigint q = mag >> shift;
    const bool guard = bit_test(mag, static_cast<unsigned>(shift - 1));
    bool lower = sticky;
    if (!lower && shift > 1)
      lower = (mag & ((bigint(1) << (shift - 1)) - 1)) != 0;
    const bool odd = q.is_zero() ? false : bit_test(q, 0);
    if (guard && (lower || odd)) ++q;
    result = std::ldexp(static_cast<double>(q.convert_to<unsigned long long>()),
                        static_cast<int>(exp2 + shift));
  }
  if (std::isinf(result))
    throw std::range_error("oracle: value overflows binary64");
  return result;
}

}  // namespace

DyadicReal::DyadicReal(bigint significand, long exponent)
    : sig_(std::move(significand)), exp_(exponent) {
  canonicalize();
}

void DyadicReal::canonicalize() {
  if (sig_.is_zero()) {
    exp_ = 0;
    return;
  }
  const unsigned trailing = lsb(boost::multiprecision::abs(sig_));
  if (trailing > 0) {
    sig_ >>= trailing;
    exp_ += static_cast<long>(trailing);
  }
  if (bit_length(boost::multiprecision::abs(sig_)) > kMaxSignificandBits)
    throw std::length_error("oracle: significand exceeds the 10^6-bit guard");
}

DyadicReal DyadicReal::from_double(double v) {
  if (!std::isfinite(v))
    throw std::invalid_argument("oracle: NaN/Inf has no dyadic value");
  if (v == 0.0) return DyadicReal();
  int e = 0;
  const double m = std::frexp(v, &e);         // v = m * 2^e, |m| in [0.5, 1)
  const double scaled = std::ldexp(m, 53);    // exact 53-bit integer
  return DyadicReal(bigint(static_cast<long long>(scaled)), e - 53);
}

DyadicReal DyadicReal::from_int(long long v) { return DyadicReal(bigint(v), 0); }

DyadicReal DyadicReal::abs() const {
  DyadicReal r = *this;
  if (r.sig_.sign() < 0) r.sig_ = -r.sig_;
  return r;
}

DyadicReal operator+(const DyadicReal& a, const DyadicReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const long e = std::min(a.exp_, b.exp_);
  // guard before shifting: the aligned significand must stay under the cap
  const long wa = static_cast<long>(bit_length(abs(a.sig_))) + (a.exp_ - e);
  const long wb = static_cast<long>(bit_length(abs(b.sig_))) + (b.exp_ - e);
  if (wa > static_cast<long>(kMaxSignificandBits) ||
      wb > static_cast<long>(kMaxSignificandBits))
    throw std::length_error("oracle: significand exceeds the 10^6-bit guard");
  bigint sa = a.sig_ << static_cast<unsigned>(a.exp_ - e);
  bigint sb = b.sig_ << static_cast<unsigned>(b.exp_ - e);
  return DyadicReal(sa + sb, e);
}

DyadicReal operator-(const DyadicReal& a, const DyadicReal& b) { return a + (-b); }

DyadicReal operator*(const DyadicReal& a, const DyadicReal& b) {
  if (a.is_zero() || b.is_zero()) return DyadicReal();
  return DyadicReal(a.sig_ * b.sig_, a.exp_ + b.exp_);
}

DyadicReal DyadicReal::operator-() const {
  DyadicReal r = *this;
  r.sig_ = -r.sig_;
  return r;
}

int DyadicReal::compare(const DyadicReal& a, const DyadicReal& b) {
  return (a - b).sign();
}

std::string DyadicReal::to_string() const {
  return sig_.str() + "*2^" + std::to_string(exp_);
}

DyadicReal o_from_components(std::span<const double> c) {
  DyadicReal sum;
  for (double v : c) sum = sum + DyadicReal::from_double(v);
  return sum;
}

double o_round_to_binary64(const DyadicReal& v) {
  if (v.is_zero()) return 0.0;
  const double mag = round_positive(abs(v.significand()), v.exponent(), false);
  return v.sign() < 0 ? -mag : mag;
}

double o_div_to_binary64(const DyadicReal& num, const DyadicReal& den) {
  if (den.is_zero()) throw std::invalid_argument("oracle: division by zero");
  if (num.is_zero()) return 0.0;

  const bigint nmag = abs(num.significand());
  const bigint dmag = abs(den.significand());
  // Give the raw quotient at least 55 bits so the rounding step always has
  // a guard position below the 53 (or fewer, if subnormal) kept bits.
  const long extra = static_cast<long>(bit_length(dmag)) -
                     static_cast<long>(bit_length(nmag)) + 55;
  const long up = extra > 0 ? extra : 0;
  bigint q, r;
  divide_qr(nmag << static_cast<unsigned>(up), dmag, q, r);
  const long exp2 = num.exponent() - den.exponent() - up;
  const double mag = round_positive(q, exp2, !r.is_zero());
  return num.sign() * den.sign() < 0 ? -mag : mag;
}

double o_rel_err(std::span<const double> approx, const DyadicReal& exact) {
  const DyadicReal a = o_from_components(approx);
  if (exact.is_zero()) {
    if (a.is_zero()) return 0.0;
    throw std::domain_error(
        "oracle: relative error against exact zero is undefined; "
        "compare absolutely");
  }
  const DyadicReal diff = a - exact;
  if (diff.is_zero()) return 0.0;
  return o_div_to_binary64(diff.abs(), exact.abs());
}

OracleMatrix o_matmul(const OracleMatrix& a, const OracleMatrix& b,
                      std::size_t guard) {
  if (a.cols != b.rows)
    throw std::invalid_argument("o_matmul: inner dimensions disagree");
  if (a.rows > guard || a.cols > guard || b.cols > guard)
    throw std::invalid_argument(
        "o_matmul: dimension exceeds the cost guard; pass a larger guard "
        "deliberately if intended");
  OracleMatrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      DyadicReal acc;
      for (std::size_t k = 0; k < a.cols; ++k)
        acc = acc + a.at(i, k) * b.at(k, j);
      c.at(i, j) = acc;
    }
  return c;
}

}  // namespace mpfkit::oracle
