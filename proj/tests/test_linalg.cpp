// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "mpfkit/convert.hpp"
#include "mpfkit/linalg.hpp"
#include "mpfkit/mpf.hpp"
#include "mpfkit/oracle.hpp"
#include "mpfkit/random.hpp"
#include "mpfkit/verify.hpp"

using namespace mpfkit;
using linalg::KernelVariant;
using linalg::MPMatrix;

namespace {

constexpr KernelVariant kVariants[] = {KernelVariant::NORMAL,
                                       KernelVariant::SIMD_SET,
                                       KernelVariant::SIMD_LOADSTORE};

template <int W>
bool bits_same(const mpf::MultiDouble<W>& a, const mpf::MultiDouble<W>& b) {
  for (int i = 0; i < W; ++i)
    if (std::bit_cast<std::uint64_t>(a.c[i]) != std::bit_cast<std::uint64_t>(b.c[i]))
      return false;
  return true;
}

template <int W>
mpf::MultiDouble<W> scale_pow2(mpf::MultiDouble<W> x, int e) {
  for (int i = 0; i < W; ++i) x.c[i] = std::ldexp(x.c[i], e);
  return x;
}

// positive entries at mildly mixed scales: no cancellation in row sums, so
// elementwise relative error bounds stay meaningful
template <int W>
MPMatrix<W> random_positive(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  rng::SplitMix64 g(seed);
  MPMatrix<W> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m.set(i, j, scale_pow2(rng::random_normalized<W>(g),
                             static_cast<int>(g.next() % 4)));
  return m;
}

template <int W>
MPMatrix<W> random_signed(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  rng::SplitMix64 g(seed);
  MPMatrix<W> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m.set(i, j, scale_pow2(rng::random_normalized_signed<W>(g),
                             static_cast<int>(g.next() % 7) - 3));
  return m;
}

template <int W>
MPMatrix<W> identity(std::size_t n) {
  MPMatrix<W> m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, mpf::from_f64<W>(1.0));
  return m;
}

template <int W>
bool pads_are_positive_zero(const MPMatrix<W>& m) {
  for (int w = 0; w < W; ++w)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = m.cols(); j < m.stride(); ++j)
        if (std::bit_cast<std::uint64_t>(m.plane(w)[i * m.stride() + j]) != 0)
          return false;
  return true;
}

std::string temp_path(const char* name) {
  return std::string("/tmp/mpfkit_test_") + name;
}

void overwrite_byte(const std::string& path, std::streamoff off, char value) {
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  REQUIRE(f.good());
  f.seekp(off);
  f.put(value);
}

void truncate_file(const std::string& path, std::size_t keep) {
  std::ifstream in(path, std::ios::binary);
  std::string all((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  in.close();
  REQUIRE(all.size() > keep);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(all.data(), static_cast<std::streamsize>(keep));
}

}  // namespace

TEST_CASE("MPMatrix stride, padding, access, and copies") {
  CHECK(linalg::pad_columns(0) == 0);
  CHECK(linalg::pad_columns(1) == 4);
  CHECK(linalg::pad_columns(4) == 4);
  CHECK(linalg::pad_columns(5) == 8);
  CHECK(linalg::pad_columns(9) == 12);

  MPMatrix<3> m(3, 5);
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 5);
  CHECK(m.stride() == 8);
  CHECK(pads_are_positive_zero(m));
  for (int w = 0; w < 3; ++w)
    CHECK(reinterpret_cast<std::uintptr_t>(m.plane(w)) % 32 == 0);

  const auto v = mpf::Double3{{1.5, 0x1p-60, -0x1p-120}};
  m.set(2, 4, v);
  CHECK(bits_same<3>(m.at(2, 4), v));

  MPMatrix<3> copy(m);
  CHECK(linalg::bits_equal(copy, m));
  copy.set(0, 0, mpf::from_f64<3>(7.0));
  CHECK(!linalg::bits_equal(copy, m));
  CHECK(m.at(0, 0).c[0] == 0.0);

  MPMatrix<3> moved(std::move(copy));
  CHECK(moved.rows() == 3);
  CHECK(copy.rows() == 0);

  CHECK_THROWS_AS((void)m.at(3, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)m.at(0, 5), std::invalid_argument);
  CHECK_THROWS_AS((void)m.plane(3), std::invalid_argument);

  const MPMatrix<2> empty;
  CHECK(empty.rows() == 0);
  CHECK(linalg::bits_equal(empty, MPMatrix<2>{}));
}

TEST_CASE("elementwise kernels match the scalar loop on ragged widths") {
  const auto run = []<int W>(std::uint64_t seed) {
    const auto a = random_signed<W>(3, 5, seed);
    const auto b = random_signed<W>(3, 5, seed + 1);
    const MPMatrix<W> zero(3, 5);

    MPMatrix<W> ref_add(3, 5), ref_mul(3, 5);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        ref_add.set(i, j, mpf::add(a.at(i, j), b.at(i, j)));
        ref_mul.set(i, j, mpf::mul(a.at(i, j), b.at(i, j)));
      }

    for (const auto v : kVariants) {
      const auto ra = linalg::ew_add(a, b, v);
      const auto rm = linalg::ew_mul(a, b, v);
      CHECK(linalg::bits_equal(ra, ref_add));
      CHECK(linalg::bits_equal(rm, ref_mul));
      CHECK(pads_are_positive_zero(ra));
      CHECK(pads_are_positive_zero(rm));
      CHECK(linalg::bits_equal(linalg::ew_add(a, zero, v), a));
    }
  };
  run.operator()<2>(401);
  run.operator()<3>(402);
  run.operator()<4>(403);

  // the merge-based triple add is its own elementwise kernel
  const auto a = random_signed<3>(2, 5, 410);
  const auto b = random_signed<3>(2, 5, 411);
  MPMatrix<3> ref(2, 5);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      ref.set(i, j, mpf::td_add_merge(a.at(i, j), b.at(i, j)));
  for (const auto v : kVariants)
    CHECK(linalg::bits_equal(linalg::ew_add_merge(a, b, v), ref));

  const auto c2 = random_signed<2>(2, 5, 412);
  MPMatrix<2> out2(2, 5);
  CHECK_THROWS_AS(linalg::ew_apply_into(out2, c2, c2, linalg::EwOp::add_merge),
                  std::invalid_argument);
  MPMatrix<3> bad(2, 4);
  CHECK_THROWS_AS((void)linalg::ew_add(a, bad), std::invalid_argument);
}

TEST_CASE("naive matmul: identity passthrough and exact small products") {
  const auto run = []<int W>(std::uint64_t seed) {
    const auto b = random_signed<W>(4, 5, seed);
    const auto eye = identity<W>(4);
    for (const auto v : kVariants) {
      const auto c = linalg::matmul_naive(eye, b, v);
      CHECK(linalg::bits_equal(c, b));
      CHECK(pads_are_positive_zero(c));
    }
  };
  run.operator()<2>(420);
  run.operator()<3>(421);
  run.operator()<4>(422);

  MPMatrix<3> ones(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) ones.set(i, j, mpf::from_f64<3>(1.0));
  const auto twos = linalg::matmul_naive(ones, ones);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(bits_same<3>(twos.at(i, j), mpf::from_f64<3>(2.0)));

  const MPMatrix<3> a(2, 3), mismatched(4, 2);
  CHECK_THROWS_AS((void)linalg::matmul_naive(a, mismatched), std::invalid_argument);
}

TEST_CASE("blocked matmul is bit-identical to naive across variants") {
  const auto run = []<int W>(std::uint64_t seed) {
    for (const std::size_t n : {std::size_t{4}, std::size_t{8}, std::size_t{33}}) {
      const auto a = random_signed<W>(n, n, seed + n);
      const auto b = random_signed<W>(n, n, seed + n + 1);
      const auto ref = linalg::matmul_naive(a, b);
      for (const auto v : kVariants) {
        CHECK(linalg::bits_equal(linalg::matmul_naive(a, b, v), ref));
        CHECK(linalg::bits_equal(linalg::matmul_block(a, b, 32, v), ref));
        if (v == KernelVariant::NORMAL)
          CHECK(linalg::bits_equal(linalg::matmul_block(a, b, 5, v), ref));
        else
          CHECK_THROWS_AS((void)linalg::matmul_block(a, b, 5, v),
                          std::invalid_argument);
        CHECK(linalg::bits_equal(linalg::matmul_block(a, b, 8, v), ref));
      }
    }
  };
  run.operator()<2>(430);
  run.operator()<3>(440);
  run.operator()<4>(450);

  // rectangular shapes take the same path
  const auto a = random_signed<3>(7, 12, 460);
  const auto b = random_signed<3>(12, 9, 461);
  const auto ref = linalg::matmul_naive(a, b);
  for (const auto v : kVariants)
    CHECK(linalg::bits_equal(linalg::matmul_block(a, b, 4, v), ref));
}

TEST_CASE("matmul stays within the format error bound against the oracle") {
  const auto run = []<int W>(std::uint64_t seed) {
    for (const std::size_t n : {std::size_t{4}, std::size_t{16}, std::size_t{33}}) {
      const auto a = random_positive<W>(n, n, seed + n);
      const auto b = random_positive<W>(n, n, seed + n + 1);
      const auto exact = oracle::o_matmul(verify::to_oracle(a), verify::to_oracle(b));
      const double bound = static_cast<double>(n) * 4.0 * mpf::format_eps<W>();
      const auto c = linalg::matmul_naive(a, b);
      CHECK(verify::max_rel_err(c, exact) <= bound);
      CHECK(verify::digit_loss(c, exact) < 2.5);
      // real strassen recursion (cutoff far below n) stays accurate too
      const auto s = linalg::matmul_strassen(a, b, 8, 4);
      CHECK(verify::max_rel_err(s, exact) <= 16.0 * bound);
    }
  };
  run.operator()<2>(470);
  run.operator()<3>(480);
  run.operator()<4>(490);
}

TEST_CASE("strassen: cutoff delegation, recursion law, odd padding") {
  const auto a = random_signed<2>(32, 32, 500);
  const auto b = random_signed<2>(32, 32, 501);
  CHECK(linalg::bits_equal(linalg::matmul_strassen(a, b, 64, 32),
                           linalg::matmul_block(a, b, 32)));

  linalg::op_counters_reset();
  (void)linalg::matmul_strassen(a, b, 32, 32);
  CHECK(linalg::op_counters_read().leaf_multiplies == 1);

  const auto a64 = random_signed<2>(64, 64, 502);
  const auto b64 = random_signed<2>(64, 64, 503);
  linalg::op_counters_reset();
  (void)linalg::matmul_strassen(a64, b64, 32, 32);
  CHECK(linalg::op_counters_read().leaf_multiplies == 7);

  const auto a128 = random_signed<2>(128, 128, 504);
  const auto b128 = random_signed<2>(128, 128, 505);
  linalg::op_counters_reset();
  (void)linalg::matmul_strassen(a128, b128, 32, 32);
  CHECK(linalg::op_counters_read().leaf_multiplies == 49);

  // odd size forces per-level zero padding; result shape is the true shape
  const auto a33 = random_positive<2>(33, 33, 506);
  const auto b33 = random_positive<2>(33, 33, 507);
  const auto s33 = linalg::matmul_strassen(a33, b33, 8, 4);
  CHECK(s33.rows() == 33);
  CHECK(s33.cols() == 33);
  CHECK(pads_are_positive_zero(s33));
  const auto exact = oracle::o_matmul(verify::to_oracle(a33), verify::to_oracle(b33));
  CHECK(verify::max_rel_err(s33, exact) <= 33 * 64.0 * mpf::format_eps<2>());

  CHECK_THROWS_AS((void)linalg::matmul_strassen(a, b, 0, 32), std::invalid_argument);
  CHECK_THROWS_AS((void)linalg::matmul_strassen_parallel(a, b, 64, 32,
                                                         KernelVariant::SIMD_SET, 0),
                  std::invalid_argument);
}

TEST_CASE("parallel products are bit-identical to serial for any worker count") {
  const auto a = random_signed<3>(33, 33, 510);
  const auto b = random_signed<3>(33, 33, 511);
  const auto ref_block = linalg::matmul_block(a, b, 8, KernelVariant::SIMD_LOADSTORE);
  const auto ref_str = linalg::matmul_strassen(a, b, 8, 4);
  for (const unsigned workers : {1u, 2u, 4u, 8u}) {
    CHECK(linalg::bits_equal(
        linalg::matmul_block_parallel(a, b, 8, KernelVariant::SIMD_LOADSTORE, workers),
        ref_block));
    CHECK(linalg::bits_equal(
        linalg::matmul_strassen_parallel(a, b, 8, 4, KernelVariant::NORMAL, workers),
        ref_str));
  }
  CHECK_THROWS_AS(
      (void)linalg::matmul_block_parallel(a, b, 8, KernelVariant::NORMAL, 0),
      std::invalid_argument);

  // _into forms clear stale contents before accumulating
  MPMatrix<3> c(33, 33);
  linalg::matmul_naive_into(c, a, b);
  linalg::matmul_block_into(c, a, b, 8, KernelVariant::SIMD_SET);
  CHECK(linalg::bits_equal(c, linalg::matmul_block(a, b, 8)));
}

TEST_CASE("mat_add and mat_sub are exact elementwise and shape-checked") {
  const auto a = random_signed<4>(3, 5, 520);
  const auto b = random_signed<4>(3, 5, 521);
  const auto s = linalg::mat_add(a, b);
  const auto d = linalg::mat_sub(a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(bits_same<4>(s.at(i, j), mpf::add(a.at(i, j), b.at(i, j))));
      CHECK(bits_same<4>(d.at(i, j), mpf::sub(a.at(i, j), b.at(i, j))));
    }
  const MPMatrix<4> wrong(5, 3);
  CHECK_THROWS_AS((void)linalg::mat_add(a, wrong), std::invalid_argument);
  CHECK_THROWS_AS((void)linalg::mat_sub(a, wrong), std::invalid_argument);
}

TEST_CASE("operation counters tally executed multi-component operations") {
  linalg::op_counters_reset();
  const auto a = random_signed<2>(4, 4, 530);
  const auto b = random_signed<2>(4, 4, 531);
  (void)linalg::matmul_naive(a, b);
  auto c = linalg::op_counters_read();
  CHECK(c.muls == 64);
  CHECK(c.adds == 48);
  CHECK(c.leaf_multiplies == 0);

  linalg::op_counters_reset();
  (void)linalg::mat_add(a, b);
  (void)linalg::ew_mul(a, b);
  c = linalg::op_counters_read();
  CHECK(c.adds == 16);
  CHECK(c.muls == 16);
}

TEST_CASE("binary matrix files round-trip bit-exactly") {
  const auto run = []<int W>(std::uint64_t seed, const char* name) {
    auto m = random_signed<W>(3, 5, seed);
    m.set(0, 0, scale_pow2(m.at(0, 0), -300));
    m.set(1, 1, scale_pow2(m.at(1, 1), 300));
    const auto path = temp_path(name);
    linalg::save_matrix_binary(m, path);
    const auto back = linalg::load_matrix_binary<W>(path);
    CHECK(linalg::bits_equal(back, m));
  };
  run.operator()<2>(540, "bin2.mpfm");
  run.operator()<3>(541, "bin3.mpfm");
  run.operator()<4>(542, "bin4.mpfm");

  const MPMatrix<2> empty(0, 0);
  const auto epath = temp_path("empty.mpfm");
  linalg::save_matrix_binary(empty, epath);
  CHECK(linalg::bits_equal(linalg::load_matrix_binary<2>(epath), empty));
}

TEST_CASE("binary loader rejects malformed files with the path in the error") {
  const auto m = random_signed<2>(1, 5, 550);
  const auto path = temp_path("malformed.mpfm");
  linalg::save_matrix_binary(m, path);

  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_binary<2>("/tmp/mpfkit_no_such"),
                       "/tmp/mpfkit_no_such: cannot open", std::runtime_error);
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_binary<3>(path),
                       doctest::Contains("component width mismatch"),
                       std::runtime_error);

  // nonzero padding cell: first plane, row 0, column 5 of stride 8
  linalg::save_matrix_binary(m, path);
  overwrite_byte(path, 33 + 5 * 8 + 6, 0x3f);
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_binary<2>(path),
                       doctest::Contains("nonzero padding"), std::runtime_error);

  linalg::save_matrix_binary(m, path);
  overwrite_byte(path, 0, 'X');
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_binary<2>(path),
                       doctest::Contains("not an MPFM file"), std::runtime_error);

  linalg::save_matrix_binary(m, path);
  truncate_file(path, 20);
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_binary<2>(path),
                       doctest::Contains("truncated"), std::runtime_error);

  linalg::save_matrix_binary(m, path);
  truncate_file(path, 33 + 40);
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_binary<2>(path),
                       doctest::Contains("truncated"), std::runtime_error);

  linalg::save_matrix_binary(m, path);
  {
    std::ofstream f(path, std::ios::binary | std::ios::app);
    f.put('\0');
  }
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_binary<2>(path),
                       doctest::Contains("trailing data"), std::runtime_error);
}

TEST_CASE("CSV matrix files round-trip through decimal strings") {
  rng::SplitMix64 g(559);
  MPMatrix<3> m(2, 3);
  m.set(0, 0, mpf::from_f64<3>(1.5));
  m.set(0, 1, mpf::from_decimal_string<3>("0.1"));
  m.set(0, 2, mpf::neg(mpf::from_decimal_string<3>("2.718281828459045235360287471352662497757")));
  m.set(1, 1, scale_pow2(rng::random_normalized<3>(g), -80));
  const auto path = temp_path("round.csv");
  linalg::save_matrix_csv(m, path);
  CHECK(linalg::bits_equal(linalg::load_matrix_csv<3>(path), m));

  // values whose exact decimal expansion exceeds the digit budget reload
  // within print precision rather than bit-exactly (the format is lossy)
  MPMatrix<3> lossy(1, 1);
  lossy.set(0, 0, scale_pow2(mpf::from_f64<3>(1.25), -80));
  const auto lpath = temp_path("lossy.csv");
  linalg::save_matrix_csv(lossy, lpath);
  const auto lback = linalg::load_matrix_csv<3>(lpath);
  CHECK(lback.at(0, 0).c[0] == lossy.at(0, 0).c[0]);
  CHECK(oracle::o_rel_err(std::span<const double>(lback.at(0, 0).c, 3),
                          mpf::to_dyadic(lossy.at(0, 0))) <= 1e-50);

  const auto sig = random_signed<2>(4, 5, 560);
  const auto path2 = temp_path("round2.csv");
  linalg::save_matrix_csv(sig, path2);
  CHECK(linalg::bits_equal(linalg::load_matrix_csv<2>(path2), sig));

  const auto bad = temp_path("bad.csv");
  {
    std::ofstream f(bad);
    f << "1,2\n3\n";
  }
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_csv<2>(bad),
                       doctest::Contains("ragged"), std::runtime_error);
  {
    std::ofstream f(bad);
    f << "1,zebra\n";
  }
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_csv<2>(bad),
                       doctest::Contains("line 1"), std::runtime_error);
  CHECK_THROWS_WITH_AS((void)linalg::load_matrix_csv<2>("/tmp/mpfkit_no_such"),
                       doctest::Contains("cannot open"), std::runtime_error);
}

TEST_CASE("verify helpers: exact results lose zero digits") {
  const auto b = random_signed<3>(4, 4, 570);
  const auto c = linalg::matmul_naive(identity<3>(4), b);
  const auto exact = verify::to_oracle(b);
  CHECK(verify::max_rel_err(c, exact) == 0.0);
  CHECK(verify::digit_loss(c, exact) == 0.0);

  oracle::OracleMatrix wrong(3, 3);
  CHECK_THROWS_AS((void)verify::max_rel_err(c, wrong), std::invalid_argument);
}
