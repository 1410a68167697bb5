// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mpfkit/linalg.hpp"
#include "mpfkit/oracle.hpp"

namespace mpfkit::verify {

// Exact value of every element (component sums as dyadic rationals).
template <int W>
oracle::OracleMatrix to_oracle(const linalg::MPMatrix<W>& m);

// Largest elementwise relative error of `approx` against `exact`.
// Shapes must match; an exactly-zero element with a nonzero approximation
// propagates o_rel_err's std::domain_error.
template <int W>
double max_rel_err(const linalg::MPMatrix<W>& approx,
                   const oracle::OracleMatrix& exact);

// Decimal digits of the format's precision lost to accumulated rounding:
// log10(max relative error) - log10(format epsilon), floored at zero, and
// zero when the result is exact.
template <int W>
double digit_loss(const linalg::MPMatrix<W>& approx,
                  const oracle::OracleMatrix& exact);

extern template oracle::OracleMatrix to_oracle<2>(const linalg::MPMatrix<2>&);
extern template oracle::OracleMatrix to_oracle<3>(const linalg::MPMatrix<3>&);
extern template oracle::OracleMatrix to_oracle<4>(const linalg::MPMatrix<4>&);
extern template double max_rel_err<2>(const linalg::MPMatrix<2>&,
                                      const oracle::OracleMatrix&);
extern template double max_rel_err<3>(const linalg::MPMatrix<3>&,
                                      const oracle::OracleMatrix&);
extern template double max_rel_err<4>(const linalg::MPMatrix<4>&,
                                      const oracle::OracleMatrix&);
extern template double digit_loss<2>(const linalg::MPMatrix<2>&,
                                     const oracle::OracleMatrix&);
extern template double digit_loss<3>(const linalg::MPMatrix<3>&,
                                     const oracle::OracleMatrix&);
extern template double digit_loss<4>(const linalg::MPMatrix<4>&,
                                     const oracle::OracleMatrix&);

}  // namespace mpfkit::verify
