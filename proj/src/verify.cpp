// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mpfkit/verify.hpp"

#include <cmath>
#include <stdexcept>

namespace mpfkit::verify {

template <int W>
oracle::OracleMatrix to_oracle(const linalg::MPMatrix<W>& m) {
  oracle::OracleMatrix o(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      o.at(i, j) = oracle::o_from_components(m.at(i, j).c);
  return o;
}

template <int W>
double max_rel_err(const linalg::MPMatrix<W>& approx,
                   const oracle::OracleMatrix& exact) {
  if (approx.rows() != exact.rows || approx.cols() != exact.cols)
    throw std::invalid_argument("max_rel_err: shape mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < approx.rows(); ++i)
    for (std::size_t j = 0; j < approx.cols(); ++j)
      worst = std::max(worst, oracle::o_rel_err(approx.at(i, j).c, exact.at(i, j)));
  return worst;
}

template <int W>
double digit_loss(const linalg::MPMatrix<W>& approx,
                  const oracle::OracleMatrix& exact) {
  const double worst = max_rel_err<W>(approx, exact);
  if (worst == 0.0) return 0.0;
  return std::max(0.0, std::log10(worst) - std::log10(mpf::format_eps<W>()));
}

template oracle::OracleMatrix to_oracle<2>(const linalg::MPMatrix<2>&);
template oracle::OracleMatrix to_oracle<3>(const linalg::MPMatrix<3>&);
template oracle::OracleMatrix to_oracle<4>(const linalg::MPMatrix<4>&);
template double max_rel_err<2>(const linalg::MPMatrix<2>&,
                               const oracle::OracleMatrix&);
template double max_rel_err<3>(const linalg::MPMatrix<3>&,
                               const oracle::OracleMatrix&);
template double max_rel_err<4>(const linalg::MPMatrix<4>&,
                               const oracle::OracleMatrix&);
template double digit_loss<2>(const linalg::MPMatrix<2>&,
                              const oracle::OracleMatrix&);
template double digit_loss<3>(const linalg::MPMatrix<3>&,
                              const oracle::OracleMatrix&);
template double digit_loss<4>(const linalg::MPMatrix<4>&,
                              const oracle::OracleMatrix&);

}  // namespace mpfkit::verify
