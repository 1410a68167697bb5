// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpfkit/linalg.hpp"

namespace mpfkit::bench {

enum class Algo { naive, block, strassen };

const char* algo_name(Algo a);
const char* precision_name(int width);  // 2/3/4 -> dd/td/qd

struct BenchConfig {
  std::vector<int> precisions = {2, 3, 4};  // component widths
  std::vector<Algo> algos = {Algo::naive, Algo::block, Algo::strassen};
  std::vector<linalg::KernelVariant> variants = {
      linalg::KernelVariant::NORMAL, linalg::KernelVariant::SIMD_SET,
      linalg::KernelVariant::SIMD_LOADSTORE};
  std::vector<std::size_t> sizes;
  std::size_t n_min = 32;
  std::size_t cutoff = 64;
  std::vector<unsigned> workers = {1};
  int reps = 5;
  std::uint64_t seed = 1;
  std::size_t oracle_max = 64;
  bool paper_matrices = false;  // false: seeded random fills
};

// Throws std::invalid_argument on unusable settings.
void validate(const BenchConfig& cfg);

struct BenchRecord {
  std::string case_id;   // "matmul/qd/block/loadstore/n256/w4"
  std::string precision; // dd / td / qd
  std::string op;        // ewise op or matmul algorithm
  std::string variant;   // normal / set / loadstore
  std::size_t n = 0;
  unsigned workers = 1;
  double seconds = 0.0;      // median of the timed repetitions
  double mflops = 0.0;       // multi-component ops per microsecond
  double max_rel_err = -1.0; // vs oracle; negative = not evaluated
  double digits_lost = -1.0; // negative = not evaluated
  bool fastest = false;      // minimum-time matmul cell per (precision, n)
};

struct BenchReport {
  std::vector<BenchRecord> records;
};

// The paper-shaped test operands: a_ij = fl64(sqrt(5))*(i+j-1) and
// b_ij = fl64(sqrt(3))*(n-i) with 1-based indices, both products taken in
// the target precision. All entries are nonnegative and B's columns are
// identical.
template <int W>
std::pair<linalg::MPMatrix<W>, linalg::MPMatrix<W>> gen_paper_matrices(
    std::size_t n);

// Seeded random operand with every element normalized, lead in [1, 2).
template <int W>
linalg::MPMatrix<W> fill_random(std::size_t rows, std::size_t cols,
                                std::uint64_t seed);

// Element-wise vector timing across variants; width 3 reports both triple
// addition kinds (add_q and add_merge). Variant outputs are checked
// bit-identical before timing.
BenchReport run_ewise_bench(const BenchConfig& cfg);

// Matrix multiply timing across algorithm x variant x precision x workers;
// parallel runs are checked bit-identical to serial before timing; oracle
// error columns attach when n <= cfg.oracle_max.
BenchReport run_matmul_bench(const BenchConfig& cfg);

// One record per row, fixed column order, header row, round-trip float
// formatting. I/O errors carry the path.
void emit_csv(const BenchReport& report, const std::string& path);
std::string to_csv(const BenchReport& report);

extern template std::pair<linalg::MPMatrix<2>, linalg::MPMatrix<2>>
gen_paper_matrices<2>(std::size_t);
extern template std::pair<linalg::MPMatrix<3>, linalg::MPMatrix<3>>
gen_paper_matrices<3>(std::size_t);
extern template std::pair<linalg::MPMatrix<4>, linalg::MPMatrix<4>>
gen_paper_matrices<4>(std::size_t);
extern template linalg::MPMatrix<2> fill_random<2>(std::size_t, std::size_t,
                                                   std::uint64_t);
extern template linalg::MPMatrix<3> fill_random<3>(std::size_t, std::size_t,
                                                   std::uint64_t);
extern template linalg::MPMatrix<4> fill_random<4>(std::size_t, std::size_t,
                                                   std::uint64_t);

}  // namespace mpfkit::bench
