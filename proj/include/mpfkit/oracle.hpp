// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mpfkit::oracle {

using bigint = boost::multiprecision::cpp_int;

// Exact dyadic rational: significand * 2^exponent with the significand odd
// (or zero, with exponent zero). Every finite binary64 value, and every sum
// and product of such values, is represented exactly. Significands are
// capped at 10^6 bits; operations that would exceed the cap throw
// std::length_error rather than degrade silently.
class DyadicReal {
 public:
  DyadicReal() = default;  // zero
  DyadicReal(bigint significand, long exponent);

  // NaN or infinity -> std::invalid_argument.
  static DyadicReal from_double(double v);
  static DyadicReal from_int(long long v);

  const bigint& significand() const { return sig_; }
  long exponent() const { return exp_; }
  bool is_zero() const { return sig_.is_zero(); }
  int sign() const { return sig_.sign(); }

  DyadicReal abs() const;

  friend DyadicReal operator+(const DyadicReal& a, const DyadicReal& b);
  friend DyadicReal operator-(const DyadicReal& a, const DyadicReal& b);
  friend DyadicReal operator*(const DyadicReal& a, const DyadicReal& b);
  DyadicReal operator-() const;
  bool operator==(const DyadicReal& o) const = default;

  // -1 / 0 / +1 comparison of values.
  static int compare(const DyadicReal& a, const DyadicReal& b);

  // Debug form "<sig>*2^<exp>".
  std::string to_string() const;

 private:
  void canonicalize();

  bigint sig_ = 0;
  long exp_ = 0;
};

// Exact sum of a component vector. NaN/Inf component -> std::invalid_argument.
DyadicReal o_from_components(std::span<const double> c);

// Round-to-nearest-even conversion to binary64, including subnormals.
// Values that round outside the finite range throw std::range_error.
double o_round_to_binary64(const DyadicReal& v);

// Correctly rounded binary64 quotient num/den (den nonzero).
double o_div_to_binary64(const DyadicReal& num, const DyadicReal& den);

// Correctly rounded |sum(approx) - exact| / |exact|. Zero exact value with a
// nonzero approximation -> std::domain_error (relative error is undefined;
// compare absolutely instead). Both zero -> 0.
double o_rel_err(std::span<const double> approx, const DyadicReal& exact);

// Dense row-major matrix of exact values.
struct OracleMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<DyadicReal> a;

  OracleMatrix() = default;
  OracleMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
  DyadicReal& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const DyadicReal& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Exact matrix product. Dimensions above `guard` throw std::invalid_argument
// (cost guard; raise it deliberately for larger verifications).
OracleMatrix o_matmul(const OracleMatrix& a, const OracleMatrix& b,
                      std::size_t guard = 64);

}  // namespace mpfkit::oracle
