// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mpfkit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mpfkit/convert.hpp"
#include "mpfkit/oracle.hpp"
#include "mpfkit/random.hpp"
#include "mpfkit/verify.hpp"

namespace mpfkit::bench {
namespace {

using linalg::KernelVariant;
using linalg::MPMatrix;

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Median of `reps` timed runs of f(), where f returns the per-pass seconds.
template <class F>
double median_seconds(int reps, F&& f) {
  std::vector<double> t(static_cast<std::size_t>(reps));
  for (auto& ti : t) ti = f();
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

// Per-case data seed: mixes the case coordinates so each (purpose, width, n)
// draws an independent, reproducible stream.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t purpose,
                       std::uint64_t width, std::uint64_t n) {
  rng::SplitMix64 g(seed ^ (purpose * 0x9e3779b97f4a7c15ULL));
  g.state += width * 0x100000001b3ULL + n;
  return g.next();
}

std::string case_id(const char* kind, const char* prec, const std::string& op,
                    KernelVariant v, std::size_t n, unsigned workers) {
  return std::string(kind) + "/" + prec + "/" + op + "/" +
         linalg::variant_name(v) + "/n" + std::to_string(n) + "/w" +
         std::to_string(workers);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct EwiseOp {
  std::string name;
  linalg::EwOp op;
};

template <int W>
std::vector<EwiseOp> ewise_ops() {
  if constexpr (W == 3)
    return {{"add_q", linalg::EwOp::add},
            {"add_merge", linalg::EwOp::add_merge},
            {"mul", linalg::EwOp::mul}};
  else
    return {{"add", linalg::EwOp::add}, {"mul", linalg::EwOp::mul}};
}

template <int W>
void ewise_for_width(const BenchConfig& cfg, BenchReport& rep) {
  const char* prec = precision_name(W);
  for (const std::size_t n : cfg.sizes) {
    const auto a = fill_random<W>(1, n, sub_seed(cfg.seed, 1, W, n));
    const auto b = fill_random<W>(1, n, sub_seed(cfg.seed, 2, W, n));
    MPMatrix<W> out(1, n);
    for (const auto& op : ewise_ops<W>()) {
      // exact elementwise values for the oracle columns
      oracle::OracleMatrix exact;
      if (n <= cfg.oracle_max) {
        exact = oracle::OracleMatrix(1, n);
        for (std::size_t j = 0; j < n; ++j) {
          const auto da = mpf::to_dyadic(a.at(0, j));
          const auto db = mpf::to_dyadic(b.at(0, j));
          exact.at(0, j) = op.op == linalg::EwOp::mul ? da * db : da + db;
        }
      }
      linalg::ew_apply_into(out, a, b, op.op, KernelVariant::NORMAL);
      const MPMatrix<W> ref = out;
      for (const auto v : cfg.variants) {
        linalg::ew_apply_into(out, a, b, op.op, v);
        if (!linalg::bits_equal(out, ref))
          throw std::runtime_error(std::string("ewise variant ") +
                                   linalg::variant_name(v) +
                                   " diverged from the scalar kernel");
        const std::size_t batch = std::max<std::size_t>(1, 262144 / std::max<std::size_t>(n, 1));
        const double sec = median_seconds(cfg.reps, [&] {
          const double t0 = now_seconds();
          for (std::size_t p = 0; p < batch; ++p)
            linalg::ew_apply_into(out, a, b, op.op, v);
          return (now_seconds() - t0) / static_cast<double>(batch);
        });
        BenchRecord r;
        r.case_id = case_id("ewise", prec, op.name, v, n, 1);
        r.precision = prec;
        r.op = op.name;
        r.variant = linalg::variant_name(v);
        r.n = n;
        r.workers = 1;
        r.seconds = sec;
        r.mflops = static_cast<double>(n) / (1e6 * sec);
        if (n <= cfg.oracle_max) {
          r.max_rel_err = verify::max_rel_err(ref, exact);
          r.digits_lost = verify::digit_loss(ref, exact);
        }
        rep.records.push_back(std::move(r));
      }
    }
  }
}

template <int W>
MPMatrix<W> run_matmul(const BenchConfig& cfg, Algo algo, KernelVariant v,
                       unsigned workers, const MPMatrix<W>& A,
                       const MPMatrix<W>& B) {
  switch (algo) {
    case Algo::naive:
      return linalg::matmul_naive(A, B, v);
    case Algo::block:
      return workers == 1
                 ? linalg::matmul_block(A, B, cfg.n_min, v)
                 : linalg::matmul_block_parallel(A, B, cfg.n_min, v, workers);
    case Algo::strassen:
      return workers == 1 ? linalg::matmul_strassen(A, B, cfg.cutoff, cfg.n_min, v)
                          : linalg::matmul_strassen_parallel(
                                A, B, cfg.cutoff, cfg.n_min, v, workers);
  }
  throw std::logic_error("unknown algorithm");
}

template <int W>
void matmul_for_width(const BenchConfig& cfg, BenchReport& rep) {
  const char* prec = precision_name(W);
  for (const std::size_t n : cfg.sizes) {
    MPMatrix<W> A, B;
    if (cfg.paper_matrices) {
      auto ab = gen_paper_matrices<W>(n);
      A = std::move(ab.first);
      B = std::move(ab.second);
    } else {
      A = fill_random<W>(n, n, sub_seed(cfg.seed, 3, W, n));
      B = fill_random<W>(n, n, sub_seed(cfg.seed, 4, W, n));
    }
    oracle::OracleMatrix exact;
    const bool with_oracle = n <= cfg.oracle_max;
    if (with_oracle)
      exact = oracle::o_matmul(verify::to_oracle(A), verify::to_oracle(B),
                               cfg.oracle_max);

    const std::size_t group_begin = rep.records.size();
    double strassen_ops = -1.0;
    const double classic_ops =
        static_cast<double>(n) * n * n + static_cast<double>(n) * n * (n - 1);

    for (const Algo algo : cfg.algos) {
      for (const auto v : cfg.variants) {
        // untimed serial run: warmup, bit-identity reference, oracle
        // columns, and (for strassen) the measured operation count
        const bool measure = algo == Algo::strassen && strassen_ops < 0;
        if (measure) linalg::op_counters_reset();
        const MPMatrix<W> serial = run_matmul<W>(cfg, algo, v, 1, A, B);
        if (measure) {
          const auto c = linalg::op_counters_read();
          strassen_ops = static_cast<double>(c.adds + c.muls);
        }
        const double ops = algo == Algo::strassen ? strassen_ops : classic_ops;

        for (const unsigned workers : cfg.workers) {
          if (workers > 1 && algo == Algo::naive) continue;
          if (workers > 1) {
            // determinism gate: the parallel product must match serial
            // bit-for-bit before its timing is worth anything
            const auto par = run_matmul<W>(cfg, algo, v, workers, A, B);
            if (!linalg::bits_equal(par, serial))
              throw std::runtime_error(
                  std::string("parallel ") + algo_name(algo) + " with " +
                  std::to_string(workers) + " workers diverged from serial");
          }
          const double sec = median_seconds(cfg.reps, [&] {
            const double t0 = now_seconds();
            (void)run_matmul<W>(cfg, algo, v, workers, A, B);
            return now_seconds() - t0;
          });
          BenchRecord r;
          r.case_id = case_id("matmul", prec, algo_name(algo), v, n, workers);
          r.precision = prec;
          r.op = algo_name(algo);
          r.variant = linalg::variant_name(v);
          r.n = n;
          r.workers = workers;
          r.seconds = sec;
          r.mflops = ops / (1e6 * sec);
          if (with_oracle) {
            r.max_rel_err = verify::max_rel_err(serial, exact);
            r.digits_lost = verify::digit_loss(serial, exact);
          }
          rep.records.push_back(std::move(r));
        }
      }
    }

    // mirror the tables' underlining: flag the fastest cell of this
    // (precision, n) group
    if (rep.records.size() > group_begin) {
      std::size_t best = group_begin;
      for (std::size_t i = group_begin + 1; i < rep.records.size(); ++i)
        if (rep.records[i].seconds < rep.records[best].seconds) best = i;
      rep.records[best].fastest = true;
    }
  }
}

template <class F>
void for_each_width(const std::vector<int>& widths, F&& f) {
  for (const int w : widths) {
    if (w == 2) f(std::integral_constant<int, 2>{});
    else if (w == 3) f(std::integral_constant<int, 3>{});
    else f(std::integral_constant<int, 4>{});
  }
}

}  // namespace

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::naive: return "naive";
    case Algo::block: return "block";
    case Algo::strassen: return "strassen";
  }
  return "?";
}

const char* precision_name(int width) {
  switch (width) {
    case 2: return "dd";
    case 3: return "td";
    case 4: return "qd";
  }
  return "?";
}

void validate(const BenchConfig& cfg) {
  if (cfg.precisions.empty()) throw std::invalid_argument("bench: no precisions");
  for (const int w : cfg.precisions)
    if (w < 2 || w > 4)
      throw std::invalid_argument("bench: precision width must be 2, 3, or 4");
  if (cfg.sizes.empty()) throw std::invalid_argument("bench: no sizes");
  for (const std::size_t n : cfg.sizes)
    if (n < 1) throw std::invalid_argument("bench: sizes must be at least 1");
  if (cfg.variants.empty()) throw std::invalid_argument("bench: no variants");
  if (cfg.algos.empty()) throw std::invalid_argument("bench: no algorithms");
  if (cfg.workers.empty()) throw std::invalid_argument("bench: no worker counts");
  for (const unsigned w : cfg.workers)
    if (w < 1) throw std::invalid_argument("bench: workers must be at least 1");
  if (cfg.reps < 1) throw std::invalid_argument("bench: reps must be at least 1");
  if (cfg.n_min < 1) throw std::invalid_argument("bench: n_min must be at least 1");
  if (cfg.cutoff < 1) throw std::invalid_argument("bench: cutoff must be at least 1");
}

template <int W>
std::pair<MPMatrix<W>, MPMatrix<W>> gen_paper_matrices(std::size_t n) {
  if (n < 1) throw std::invalid_argument("gen_paper_matrices: n must be at least 1");
  const auto r5 = mpf::from_f64<W>(std::sqrt(5.0));
  const auto r3 = mpf::from_f64<W>(std::sqrt(3.0));
  MPMatrix<W> A(n, n), B(n, n);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto brow = mpf::mul(r3, mpf::from_f64<W>(static_cast<double>(n - i)));
    for (std::size_t j = 1; j <= n; ++j) {
      A.set(i - 1, j - 1,
            mpf::mul(r5, mpf::from_f64<W>(static_cast<double>(i + j - 1))));
      B.set(i - 1, j - 1, brow);
    }
  }
  return {std::move(A), std::move(B)};
}

template <int W>
MPMatrix<W> fill_random(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  rng::SplitMix64 g(seed);
  MPMatrix<W> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m.set(i, j, rng::random_normalized<W>(g));
  return m;
}

BenchReport run_ewise_bench(const BenchConfig& cfg) {
  validate(cfg);
  BenchReport rep;
  for_each_width(cfg.precisions,
                 [&](auto wc) { ewise_for_width<wc.value>(cfg, rep); });
  return rep;
}

BenchReport run_matmul_bench(const BenchConfig& cfg) {
  validate(cfg);
  BenchReport rep;
  for_each_width(cfg.precisions,
                 [&](auto wc) { matmul_for_width<wc.value>(cfg, rep); });
  return rep;
}

std::string to_csv(const BenchReport& report) {
  std::string out =
      "case,precision,op,variant,n,workers,seconds,mflops,max_rel_err,"
      "digits_lost,fastest\n";
  for (const auto& r : report.records) {
    out += r.case_id + ',' + r.precision + ',' + r.op + ',' + r.variant + ',' +
           std::to_string(r.n) + ',' + std::to_string(r.workers) + ',' +
           fmt_double(r.seconds) + ',' + fmt_double(r.mflops) + ',';
    if (r.max_rel_err >= 0.0) out += fmt_double(r.max_rel_err);
    out += ',';
    if (r.digits_lost >= 0.0) out += fmt_double(r.digits_lost);
    out += ',';
    out += r.fastest ? '1' : '0';
    out += '\n';
  }
  return out;
}

void emit_csv(const BenchReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  const auto body = to_csv(report);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  f.flush();
  if (!f) throw std::runtime_error(path + ": write failed");
}

template std::pair<MPMatrix<2>, MPMatrix<2>> gen_paper_matrices<2>(std::size_t);
template std::pair<MPMatrix<3>, MPMatrix<3>> gen_paper_matrices<3>(std::size_t);
template std::pair<MPMatrix<4>, MPMatrix<4>> gen_paper_matrices<4>(std::size_t);
template MPMatrix<2> fill_random<2>(std::size_t, std::size_t, std::uint64_t);
template MPMatrix<3> fill_random<3>(std::size_t, std::size_t, std::uint64_t);
template MPMatrix<4> fill_random<4>(std::size_t, std::size_t, std::uint64_t);

}  // namespace mpfkit::bench
