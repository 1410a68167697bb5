// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark driver: element-wise kernel and matrix-multiplication timing
// across precisions, algorithms, data-movement variants, and worker counts,
// reported as CSV (stdout or --out) with oracle error columns at small sizes.

#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpfkit/bench.hpp"

namespace {

using mpfkit::bench::Algo;
using mpfkit::linalg::KernelVariant;

std::vector<int> parse_precisions(const std::vector<std::string>& names) {
  std::vector<int> widths;
  for (const auto& s : names) {
    if (s == "all") return {2, 3, 4};
    if (s == "dd") widths.push_back(2);
    else if (s == "td") widths.push_back(3);
    else if (s == "qd") widths.push_back(4);
    else throw CLI::ValidationError("--precision", "expected dd|td|qd|all");
  }
  return widths;
}

std::vector<Algo> parse_algos(const std::vector<std::string>& names) {
  std::vector<Algo> algos;
  for (const auto& s : names) {
    if (s == "all") return {Algo::naive, Algo::block, Algo::strassen};
    if (s == "naive") algos.push_back(Algo::naive);
    else if (s == "block") algos.push_back(Algo::block);
    else if (s == "strassen") algos.push_back(Algo::strassen);
    else throw CLI::ValidationError("--algo", "expected naive|block|strassen|all");
  }
  return algos;
}

std::vector<KernelVariant> parse_variants(const std::vector<std::string>& names) {
  std::vector<KernelVariant> vs;
  for (const auto& s : names) {
    if (s == "all")
      return {KernelVariant::NORMAL, KernelVariant::SIMD_SET,
              KernelVariant::SIMD_LOADSTORE};
    if (s == "normal") vs.push_back(KernelVariant::NORMAL);
    else if (s == "set") vs.push_back(KernelVariant::SIMD_SET);
    else if (s == "loadstore") vs.push_back(KernelVariant::SIMD_LOADSTORE);
    else
      throw CLI::ValidationError("--variant", "expected normal|set|loadstore|all");
  }
  return vs;
}

struct CliOptions {
  std::vector<std::string> precision = {"all"};
  std::vector<std::string> algo = {"all"};
  std::vector<std::string> variant = {"all"};
  std::vector<std::size_t> sizes;
  std::size_t nmin = 32;
  std::size_t cutoff = 64;
  std::vector<unsigned> workers = {1};
  int reps = 5;
  std::uint64_t seed = 1;
  std::size_t oracle_max = 64;
  std::string out;
  bool paper = false;
  bool random = false;
};

void add_common_options(CLI::App* sub, CliOptions& o) {
  sub->add_option("--precision", o.precision, "dd|td|qd|all (comma list)")
      ->delimiter(',');
  sub->add_option("--variant", o.variant, "normal|set|loadstore|all (comma list)")
      ->delimiter(',');
  sub->add_option("--sizes", o.sizes, "problem sizes n (comma list)")
      ->delimiter(',');
  sub->add_option("--reps", o.reps, "timed repetitions per cell (median)");
  sub->add_option("--seed", o.seed, "PRNG seed for operand data");
  sub->add_option("--oracle-max", o.oracle_max,
                  "attach exact-oracle error columns when n <= this");
  sub->add_option("--out", o.out, "CSV output path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-component extended-precision benchmark driver"};
  app.require_subcommand(1);
  CliOptions o;

  auto* ew = app.add_subcommand("ewise", "element-wise vector kernel timing");
  add_common_options(ew, o);

  auto* mm = app.add_subcommand("matmul", "matrix multiplication timing");
  add_common_options(mm, o);
  mm->add_option("--algo", o.algo, "naive|block|strassen|all (comma list)")
      ->delimiter(',');
  mm->add_option("--nmin", o.nmin, "blocked-kernel tile size");
  mm->add_option("--cutoff", o.cutoff, "strassen recursion cutoff");
  mm->add_option("--workers", o.workers, "worker counts (comma list)")
      ->delimiter(',');
  auto* paper = mm->add_flag("--paper-matrices", o.paper,
                             "use the structured paper generators");
  auto* random = mm->add_flag("--random", o.random,
                              "use seeded random operands (default)");
  paper->excludes(random);
  random->excludes(paper);

  CLI11_PARSE(app, argc, argv);

  try {
    mpfkit::bench::BenchConfig cfg;
    cfg.precisions = parse_precisions(o.precision);
    cfg.algos = parse_algos(o.algo);
    cfg.variants = parse_variants(o.variant);
    cfg.n_min = o.nmin;
    cfg.cutoff = o.cutoff;
    cfg.workers = o.workers;
    cfg.reps = o.reps;
    cfg.seed = o.seed;
    cfg.oracle_max = o.oracle_max;
    cfg.paper_matrices = o.paper;

    mpfkit::bench::BenchReport report;
    if (mm->parsed()) {
      cfg.sizes = o.sizes.empty()
                      ? std::vector<std::size_t>{64, 128, 256, 512, 1024}
                      : o.sizes;
      report = mpfkit::bench::run_matmul_bench(cfg);
    } else {
      cfg.sizes = o.sizes.empty() ? std::vector<std::size_t>{1024, 16384, 262144}
                                  : o.sizes;
      report = mpfkit::bench::run_ewise_bench(cfg);
    }

    if (o.out.empty()) {
      std::cout << mpfkit::bench::to_csv(report);
    } else {
      mpfkit::bench::emit_csv(report, o.out);
    }
    std::cerr << report.records.size() << " records written to "
              << (o.out.empty() ? std::string("stdout") : o.out) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mpfbench: " << e.what() << "\n";
    return 1;
  }
}
