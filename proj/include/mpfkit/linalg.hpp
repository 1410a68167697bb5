// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "mpfkit/mpf.hpp"

namespace mpfkit::linalg {

// ---------------------------------------------------------------------------
// Component-planar dense matrix: one contiguous binary64 plane per component,
// row-major with the column count rounded up to a multiple of four so every
// row of every plane starts 32-byte aligned and quad kernels never straddle
// rows. Padding cells are kept exactly +0 by every operation.
// ---------------------------------------------------------------------------

inline constexpr std::size_t pad_columns(std::size_t cols) {
  return (cols + 3) & ~static_cast<std::size_t>(3);
}

template <int W>
class MPMatrix {
 public:
  MPMatrix() = default;

  MPMatrix(std::size_t rows, std::size_t cols) { reset(rows, cols); }

  MPMatrix(const MPMatrix& o) { *this = o; }

  MPMatrix& operator=(const MPMatrix& o) {
    if (this == &o) return *this;
    reset(o.rows_, o.cols_);
    if (data_) std::memcpy(data_.get(), o.data_.get(), bytes());
    return *this;
  }

  MPMatrix(MPMatrix&& o) noexcept
      : rows_(o.rows_), cols_(o.cols_), stride_(o.stride_), data_(std::move(o.data_)) {
    o.rows_ = o.cols_ = o.stride_ = 0;
  }

  MPMatrix& operator=(MPMatrix&& o) noexcept {
    rows_ = o.rows_, cols_ = o.cols_, stride_ = o.stride_;
    data_ = std::move(o.data_);
    o.rows_ = o.cols_ = o.stride_ = 0;
    return *this;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t stride() const { return stride_; }
  std::size_t plane_size() const { return rows_ * stride_; }

  double* plane(int w) {
    MPFKIT_CHECK(w >= 0 && w < W, "MPMatrix::plane: component out of range");
    return data_.get() + static_cast<std::size_t>(w) * plane_size();
  }
  const double* plane(int w) const {
    MPFKIT_CHECK(w >= 0 && w < W, "MPMatrix::plane: component out of range");
    return data_.get() + static_cast<std::size_t>(w) * plane_size();
  }

  mpf::MultiDouble<W> at(std::size_t i, std::size_t j) const {
    MPFKIT_CHECK(i < rows_ && j < cols_, "MPMatrix::at: index out of range");
    mpf::MultiDouble<W> v;
    for (int w = 0; w < W; ++w) v.c[w] = plane(w)[i * stride_ + j];
    return v;
  }

  void set(std::size_t i, std::size_t j, const mpf::MultiDouble<W>& v) {
    MPFKIT_CHECK(i < rows_ && j < cols_, "MPMatrix::set: index out of range");
    for (int w = 0; w < W; ++w) plane(w)[i * stride_ + j] = v.c[w];
  }

  bool same_shape(const MPMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  void fill_zero() {
    if (data_) std::memset(data_.get(), 0, bytes());
  }

  // restore the +0 padding invariant after quad kernels have run over pads
  void zero_pads() {
    if (!data_ || stride_ == cols_) return;
    for (int w = 0; w < W; ++w) {
      double* p = plane(w);
      for (std::size_t i = 0; i < rows_; ++i)
        std::memset(p + i * stride_ + cols_, 0, (stride_ - cols_) * sizeof(double));
    }
  }

 private:
  void reset(std::size_t rows, std::size_t cols) {
    rows_ = rows, cols_ = cols;
    stride_ = pad_columns(cols);
    data_.reset();
    const std::size_t n = bytes();
    if (n == 0) return;
    void* p = std::aligned_alloc(32, n);
    if (!p) throw std::bad_alloc();
    data_.reset(static_cast<double*>(p));
    std::memset(p, 0, n);
  }

  std::size_t bytes() const { return W * plane_size() * sizeof(double); }

  struct Free {
    void operator()(double* p) const { std::free(p); }
  };

  std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
  std::unique_ptr<double[], Free> data_;
};

// Full-representation equality: every plane, padding included.
template <int W>
inline bool bits_equal(const MPMatrix<W>& a, const MPMatrix<W>& b) {
  if (!a.same_shape(b)) return false;
  if (a.plane_size() == 0) return true;
  for (int w = 0; w < W; ++w)
    if (std::memcmp(a.plane(w), b.plane(w), a.plane_size() * sizeof(double)) != 0)
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Kernel variants: identical arithmetic, different data movement.
//   NORMAL         scalar loads/stores assembling one element at a time
//   SIMD_SET       quad arithmetic fed by per-lane scalar gathers
//   SIMD_LOADSTORE quad arithmetic fed by aligned vector loads/stores
// ---------------------------------------------------------------------------

enum class KernelVariant { NORMAL, SIMD_SET, SIMD_LOADSTORE };

inline const char* variant_name(KernelVariant v) {
  switch (v) {
    case KernelVariant::NORMAL: return "normal";
    case KernelVariant::SIMD_SET: return "set";
    case KernelVariant::SIMD_LOADSTORE: return "loadstore";
  }
  return "?";
}

// Global operation tally (multi-component adds/muls and Strassen leaf
// multiplies), used for op-count reporting and the 7^k recursion law.
struct OpCounts {
  std::uint64_t adds = 0;
  std::uint64_t muls = 0;
  std::uint64_t leaf_multiplies = 0;
};

void op_counters_reset();
OpCounts op_counters_read();

namespace detail {

extern std::atomic<std::uint64_t> g_adds, g_muls, g_leaf_multiplies;

inline void count_matmul(std::size_t m, std::size_t n, std::size_t k) {
  if (k == 0) return;
  g_muls.fetch_add(static_cast<std::uint64_t>(m) * n * k, std::memory_order_relaxed);
  g_adds.fetch_add(static_cast<std::uint64_t>(m) * n * (k - 1),
                   std::memory_order_relaxed);
}

// ---- data movers ----------------------------------------------------------

template <class Tag>
struct SetMover {
  static simd::LaneQuad load(const double* plane, std::size_t off) {
    simd::LaneQuad q;
    for (std::size_t l = 0; l < simd::lane_count; ++l)
      simd::set_lane(q, l, plane[off + l]);
    return q;
  }
  static void store(double* plane, std::size_t off, const simd::LaneQuad& q) {
    for (std::size_t l = 0; l < simd::lane_count; ++l)
      plane[off + l] = simd::get_lane(q, l);
  }
  static simd::LaneQuad broadcast(const double* p) { return simd::lq_splat<Tag>(*p); }
};

template <class Tag>
struct LoadStoreMover {
  static simd::LaneQuad load(const double* plane, std::size_t off) {
    return simd::lq_load_aligned<Tag>(plane, off);
  }
  static void store(double* plane, std::size_t off, const simd::LaneQuad& q) {
    simd::lq_store_aligned<Tag>(plane, off, q);
  }
  static simd::LaneQuad broadcast(const double* p) { return simd::lq_broadcast<Tag>(p); }
};

template <int W, class Mover>
inline mpf::PackedMulti<W> load_quad(const MPMatrix<W>& m, std::size_t off) {
  mpf::PackedMulti<W> p;
  for (int w = 0; w < W; ++w) p.comp[w] = Mover::load(m.plane(w), off);
  return p;
}

template <int W, class Mover>
inline void store_quad(MPMatrix<W>& m, std::size_t off, const mpf::PackedMulti<W>& p) {
  for (int w = 0; w < W; ++w) Mover::store(m.plane(w), off, p.comp[w]);
}

template <int W, class Mover>
inline mpf::PackedMulti<W> broadcast_elem(const MPMatrix<W>& m, std::size_t off) {
  mpf::PackedMulti<W> p;
  for (int w = 0; w < W; ++w) p.comp[w] = Mover::broadcast(m.plane(w) + off);
  return p;
}

// ---- row kernels ----------------------------------------------------------
// C[i, j0..j1) (+)= A(i,k) * B(k, j0..j1). `first` means k == 0: the product
// initializes the element instead of accumulating, so every element's
// operation sequence is mul, then adds in ascending k — identical across
// algorithms and variants.

template <int W>
struct NormalRow {
  static void axpy(const MPMatrix<W>& A, const MPMatrix<W>& B, MPMatrix<W>& C,
                   std::size_t i, std::size_t k, std::size_t j0, std::size_t j1,
                   bool first) {
    const auto a = A.at(i, k);
    if (first) {
      for (std::size_t j = j0; j < j1; ++j) C.set(i, j, mpf::mul(a, B.at(k, j)));
    } else {
      for (std::size_t j = j0; j < j1; ++j)
        C.set(i, j, mpf::add(C.at(i, j), mpf::mul(a, B.at(k, j))));
    }
  }
};

template <int W, class Tag, template <class> class M>
struct QuadRow {
  using Mover = M<Tag>;
  static void axpy(const MPMatrix<W>& A, const MPMatrix<W>& B, MPMatrix<W>& C,
                   std::size_t i, std::size_t k, std::size_t j0, std::size_t j1,
                   bool first) {
    const auto a = broadcast_elem<W, Mover>(A, i * A.stride() + k);
    const std::size_t brow = k * B.stride(), crow = i * C.stride();
    for (std::size_t j = j0; j < j1; j += simd::lane_count) {
      const auto b = load_quad<W, Mover>(B, brow + j);
      auto p = mpf::mul<Tag>(a, b);
      if (!first) p = mpf::add<Tag>(load_quad<W, Mover>(C, crow + j), p);
      store_quad<W, Mover>(C, crow + j, p);
    }
  }
};

// Shared panel loop: i rows by k terms over one j range. The SIMD variants
// take j ranges that are multiples of four (the last range runs into the
// zero padding, which is re-zeroed afterwards).
template <int W, class Row>
void mul_panel(const MPMatrix<W>& A, const MPMatrix<W>& B, MPMatrix<W>& C,
               std::size_t i0, std::size_t i1, std::size_t k0, std::size_t k1,
               std::size_t j0, std::size_t j1) {
  for (std::size_t i = i0; i < i1; ++i)
    for (std::size_t k = k0; k < k1; ++k)
      Row::axpy(A, B, C, i, k, j0, j1, k == 0);
}

template <int W>
void check_mul_shapes(const MPMatrix<W>& A, const MPMatrix<W>& B,
                      const MPMatrix<W>& C) {
  if (A.cols() != B.rows())
    throw std::invalid_argument("matmul: inner dimensions differ");
  if (C.rows() != A.rows() || C.cols() != B.cols())
    throw std::invalid_argument("matmul: result shape mismatch");
}

inline bool is_simd(KernelVariant v) { return v != KernelVariant::NORMAL; }

inline void check_n_min(std::size_t n_min, KernelVariant v) {
  if (n_min < 1) throw std::invalid_argument("matmul: n_min must be at least 1");
  if (is_simd(v) && n_min % simd::lane_count != 0)
    throw std::invalid_argument("matmul: SIMD variants need n_min divisible by 4");
}

// Bind the row-kernel type for a variant on the active backend and invoke
// f(std::type_identity<Row>{}).
template <int W, class F>
void dispatch_row(KernelVariant v, F&& f) {
  if (v == KernelVariant::NORMAL) {
    f(std::type_identity<NormalRow<W>>{});
    return;
  }
  mpf::detail::with_backend([&](auto tag) {
    using Tag = decltype(tag);
    if (v == KernelVariant::SIMD_SET)
      f(std::type_identity<QuadRow<W, Tag, SetMover>>{});
    else
      f(std::type_identity<QuadRow<W, Tag, LoadStoreMover>>{});
  });
}

// Run `body(t)` on `threads` workers, propagating the first exception.
template <class F>
void run_on_threads(unsigned threads, F&& body) {
  if (threads <= 1) {
    body(0u);
    return;
  }
  std::vector<std::exception_ptr> errs(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        body(t);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix multiplication. All algorithms and variants accumulate each output
// element in ascending-k order, so for one (A, B) every combination of
// {naive, block, strassen-below-cutoff} x {NORMAL, SIMD_SET, SIMD_LOADSTORE}
// x worker count is bit-identical where the algorithms coincide, and naive
// and block are bit-identical always.
// ---------------------------------------------------------------------------

template <int W>
void matmul_naive_into(MPMatrix<W>& C, const MPMatrix<W>& A, const MPMatrix<W>& B,
                       KernelVariant variant = KernelVariant::NORMAL) {
  detail::check_mul_shapes(A, B, C);
  C.fill_zero();
  const std::size_t jmax = detail::is_simd(variant) ? C.stride() : C.cols();
  detail::dispatch_row<W>(variant, [&](auto rowt) {
    using Row = typename decltype(rowt)::type;
    detail::mul_panel<W, Row>(A, B, C, 0, A.rows(), 0, A.cols(), 0, jmax);
  });
  C.zero_pads();
  detail::count_matmul(A.rows(), B.cols(), A.cols());
}

template <int W>
MPMatrix<W> matmul_naive(const MPMatrix<W>& A, const MPMatrix<W>& B,
                         KernelVariant variant = KernelVariant::NORMAL) {
  MPMatrix<W> C(A.rows(), B.cols());
  matmul_naive_into(C, A, B, variant);
  return C;
}

template <int W>
void matmul_block_into(MPMatrix<W>& C, const MPMatrix<W>& A, const MPMatrix<W>& B,
                       std::size_t n_min = 32,
                       KernelVariant variant = KernelVariant::NORMAL) {
  detail::check_mul_shapes(A, B, C);
  detail::check_n_min(n_min, variant);
  C.fill_zero();
  const std::size_t m = A.rows(), K = A.cols();
  const std::size_t jmax = detail::is_simd(variant) ? C.stride() : C.cols();
  detail::dispatch_row<W>(variant, [&](auto rowt) {
    using Row = typename decltype(rowt)::type;
    for (std::size_t ib = 0; ib < m; ib += n_min)
      for (std::size_t kb = 0; kb < K; kb += n_min)
        for (std::size_t jb = 0; jb < jmax; jb += n_min)
          detail::mul_panel<W, Row>(A, B, C, ib, std::min(ib + n_min, m), kb,
                                    std::min(kb + n_min, K), jb,
                                    std::min(jb + n_min, jmax));
  });
  C.zero_pads();
  detail::count_matmul(m, B.cols(), K);
}

template <int W>
MPMatrix<W> matmul_block(const MPMatrix<W>& A, const MPMatrix<W>& B,
                         std::size_t n_min = 32,
                         KernelVariant variant = KernelVariant::NORMAL) {
  MPMatrix<W> C(A.rows(), B.cols());
  matmul_block_into(C, A, B, n_min, variant);
  return C;
}

// Disjoint contiguous spans of row blocks go to each worker; the per-element
// summation order is untouched, so any worker count is bit-identical to the
// serial result.
template <int W>
void matmul_block_parallel_into(MPMatrix<W>& C, const MPMatrix<W>& A,
                                const MPMatrix<W>& B, std::size_t n_min = 32,
                                KernelVariant variant = KernelVariant::NORMAL,
                                unsigned workers = 1) {
  detail::check_mul_shapes(A, B, C);
  detail::check_n_min(n_min, variant);
  if (workers < 1) throw std::invalid_argument("matmul: workers must be at least 1");
  C.fill_zero();
  const std::size_t m = A.rows(), K = A.cols();
  const std::size_t jmax = detail::is_simd(variant) ? C.stride() : C.cols();
  const std::size_t nblocks = (m + n_min - 1) / n_min;
  const unsigned nt = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(nblocks, 1)));
  const std::size_t per = (nblocks + nt - 1) / nt;
  detail::dispatch_row<W>(variant, [&](auto rowt) {
    using Row = typename decltype(rowt)::type;
    detail::run_on_threads(nt, [&](unsigned t) {
      const std::size_t b0 = t * per, b1 = std::min(nblocks, b0 + per);
      for (std::size_t b = b0; b < b1; ++b) {
        const std::size_t ib = b * n_min;
        for (std::size_t kb = 0; kb < K; kb += n_min)
          for (std::size_t jb = 0; jb < jmax; jb += n_min)
            detail::mul_panel<W, Row>(A, B, C, ib, std::min(ib + n_min, m), kb,
                                      std::min(kb + n_min, K), jb,
                                      std::min(jb + n_min, jmax));
      }
    });
  });
  C.zero_pads();
  detail::count_matmul(m, B.cols(), K);
}

template <int W>
MPMatrix<W> matmul_block_parallel(const MPMatrix<W>& A, const MPMatrix<W>& B,
                                  std::size_t n_min = 32,
                                  KernelVariant variant = KernelVariant::NORMAL,
                                  unsigned workers = 1) {
  MPMatrix<W> C(A.rows(), B.cols());
  matmul_block_parallel_into(C, A, B, n_min, variant, workers);
  return C;
}

// ---------------------------------------------------------------------------
// Whole-matrix add/sub (Strassen plumbing; exact negation, scalar kernels so
// every variant of the surrounding recursion agrees bitwise).
// ---------------------------------------------------------------------------

template <int W>
MPMatrix<W> mat_add(const MPMatrix<W>& a, const MPMatrix<W>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mat_add: shape mismatch");
  MPMatrix<W> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      r.set(i, j, mpf::add(a.at(i, j), b.at(i, j)));
  detail::g_adds.fetch_add(a.rows() * a.cols(), std::memory_order_relaxed);
  return r;
}

template <int W>
MPMatrix<W> mat_sub(const MPMatrix<W>& a, const MPMatrix<W>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mat_sub: shape mismatch");
  MPMatrix<W> r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      r.set(i, j, mpf::sub(a.at(i, j), b.at(i, j)));
  detail::g_adds.fetch_add(a.rows() * a.cols(), std::memory_order_relaxed);
  return r;
}

// ---------------------------------------------------------------------------
// Strassen. Classical 7-product recursion on 2x2 block partitions; odd
// dimensions are zero-padded to even at each level and stripped on return;
// at or below the cutoff the leaf delegates to matmul_block (and counts one
// leaf multiply).
// ---------------------------------------------------------------------------

namespace detail {

// Copy a `rows` x `cols` window starting at (i0, j0); parts outside the
// source stay zero, which implements per-level even padding for free.
template <int W>
MPMatrix<W> copy_block(const MPMatrix<W>& src, std::size_t i0, std::size_t j0,
                       std::size_t rows, std::size_t cols) {
  MPMatrix<W> r(rows, cols);
  if (i0 >= src.rows() || j0 >= src.cols()) return r;
  const std::size_t ni = std::min(rows, src.rows() - i0);
  const std::size_t nj = std::min(cols, src.cols() - j0);
  for (int w = 0; w < W; ++w) {
    const double* sp = src.plane(w);
    double* dp = r.plane(w);
    for (std::size_t i = 0; i < ni; ++i)
      std::memcpy(dp + i * r.stride(), sp + (i0 + i) * src.stride() + j0,
                  nj * sizeof(double));
  }
  return r;
}

// Paste src at (i0, j0), clipped to dst's bounds (strips padding).
template <int W>
void paste_block(MPMatrix<W>& dst, const MPMatrix<W>& src, std::size_t i0,
                 std::size_t j0) {
  if (i0 >= dst.rows() || j0 >= dst.cols()) return;
  const std::size_t ni = std::min(src.rows(), dst.rows() - i0);
  const std::size_t nj = std::min(src.cols(), dst.cols() - j0);
  for (int w = 0; w < W; ++w) {
    const double* sp = src.plane(w);
    double* dp = dst.plane(w);
    for (std::size_t i = 0; i < ni; ++i)
      std::memcpy(dp + (i0 + i) * dst.stride() + j0, sp + i * src.stride(),
                  nj * sizeof(double));
  }
}

template <int W>
struct StrassenOperands {
  std::array<MPMatrix<W>, 7> left, right;
};

// The 14 subproblem operands, in the fixed M1..M7 order.
template <int W>
StrassenOperands<W> strassen_operands(const MPMatrix<W>& A, const MPMatrix<W>& B) {
  const std::size_t hm = (A.rows() + 1) / 2;
  const std::size_t hk = (A.cols() + 1) / 2;
  const std::size_t hn = (B.cols() + 1) / 2;
  const auto A11 = copy_block(A, 0, 0, hm, hk), A12 = copy_block(A, 0, hk, hm, hk);
  const auto A21 = copy_block(A, hm, 0, hm, hk), A22 = copy_block(A, hm, hk, hm, hk);
  const auto B11 = copy_block(B, 0, 0, hk, hn), B12 = copy_block(B, 0, hn, hk, hn);
  const auto B21 = copy_block(B, hk, 0, hk, hn), B22 = copy_block(B, hk, hn, hk, hn);
  StrassenOperands<W> s;
  s.left[0] = mat_add(A11, A22);  s.right[0] = mat_add(B11, B22);   // M1
  s.left[1] = mat_add(A21, A22);  s.right[1] = B11;                 // M2
  s.left[2] = A11;                s.right[2] = mat_sub(B12, B22);   // M3
  s.left[3] = A22;                s.right[3] = mat_sub(B21, B11);   // M4
  s.left[4] = mat_add(A11, A12);  s.right[4] = B22;                 // M5
  s.left[5] = mat_sub(A21, A11);  s.right[5] = mat_add(B11, B12);   // M6
  s.left[6] = mat_sub(A12, A22);  s.right[6] = mat_add(B21, B22);   // M7
  return s;
}

// Combine the seven products into C (clipping strips the even padding).
template <int W>
MPMatrix<W> strassen_combine(const std::array<MPMatrix<W>, 7>& M, std::size_t m,
                             std::size_t n, std::size_t hm, std::size_t hn) {
  const auto& M1 = M[0];
  const auto& M2 = M[1];
  const auto& M3 = M[2];
  const auto& M4 = M[3];
  const auto& M5 = M[4];
  const auto& M6 = M[5];
  const auto& M7 = M[6];
  const auto C11 = mat_add(mat_sub(mat_add(M1, M4), M5), M7);
  const auto C12 = mat_add(M3, M5);
  const auto C21 = mat_add(M2, M4);
  const auto C22 = mat_add(mat_add(mat_sub(M1, M2), M3), M6);
  MPMatrix<W> C(m, n);
  paste_block(C, C11, 0, 0);
  paste_block(C, C12, 0, hn);
  paste_block(C, C21, hm, 0);
  paste_block(C, C22, hm, hn);
  return C;
}

template <int W>
MPMatrix<W> strassen_rec(const MPMatrix<W>& A, const MPMatrix<W>& B,
                         std::size_t cutoff, std::size_t n_min, KernelVariant v) {
  const std::size_t m = A.rows(), K = A.cols(), n = B.cols();
  if (std::min({m, K, n}) <= cutoff) {
    g_leaf_multiplies.fetch_add(1, std::memory_order_relaxed);
    return matmul_block(A, B, n_min, v);
  }
  const auto ops = strassen_operands(A, B);
  std::array<MPMatrix<W>, 7> M;
  for (int t = 0; t < 7; ++t)
    M[t] = strassen_rec(ops.left[t], ops.right[t], cutoff, n_min, v);
  return strassen_combine(M, m, n, (m + 1) / 2, (n + 1) / 2);
}

}  // namespace detail

template <int W>
MPMatrix<W> matmul_strassen(const MPMatrix<W>& A, const MPMatrix<W>& B,
                            std::size_t cutoff = 64, std::size_t n_min = 32,
                            KernelVariant variant = KernelVariant::NORMAL) {
  MPMatrix<W> probe(A.rows(), B.cols());
  detail::check_mul_shapes(A, B, probe);
  detail::check_n_min(n_min, variant);
  if (cutoff < 1) throw std::invalid_argument("matmul: cutoff must be at least 1");
  return detail::strassen_rec(A, B, cutoff, n_min, variant);
}

// Parallelizes the seven top-level subproducts over at most `workers`
// threads; each subproduct runs the serial recursion, and the combine is
// serial, so the result is bit-identical to the serial version.
template <int W>
MPMatrix<W> matmul_strassen_parallel(const MPMatrix<W>& A, const MPMatrix<W>& B,
                                     std::size_t cutoff = 64, std::size_t n_min = 32,
                                     KernelVariant variant = KernelVariant::NORMAL,
                                     unsigned workers = 1) {
  MPMatrix<W> probe(A.rows(), B.cols());
  detail::check_mul_shapes(A, B, probe);
  detail::check_n_min(n_min, variant);
  if (cutoff < 1) throw std::invalid_argument("matmul: cutoff must be at least 1");
  if (workers < 1) throw std::invalid_argument("matmul: workers must be at least 1");
  const std::size_t m = A.rows(), K = A.cols(), n = B.cols();
  if (workers == 1 || std::min({m, K, n}) <= cutoff)
    return detail::strassen_rec(A, B, cutoff, n_min, variant);
  const auto ops = detail::strassen_operands(A, B);
  std::array<MPMatrix<W>, 7> M;
  std::atomic<int> next{0};
  detail::run_on_threads(std::min(workers, 7u), [&](unsigned) {
    for (int t = next.fetch_add(1); t < 7; t = next.fetch_add(1))
      M[t] = detail::strassen_rec(ops.left[t], ops.right[t], cutoff, n_min, variant);
  });
  return detail::strassen_combine(M, m, n, (m + 1) / 2, (n + 1) / 2);
}

// ---------------------------------------------------------------------------
// Elementwise operations (the vector benchmarks run these on 1 x n shapes).
// ---------------------------------------------------------------------------

enum class EwOp { add, mul, add_merge };

namespace detail {

template <int W, class Tag>
mpf::PackedMulti<W> ew_packed(EwOp op, const mpf::PackedMulti<W>& a,
                              const mpf::PackedMulti<W>& b) {
  if constexpr (W == 3) {
    if (op == EwOp::add_merge) return mpf::td_add_merge<Tag>(a, b);
  }
  return op == EwOp::mul ? mpf::mul<Tag>(a, b) : mpf::add<Tag>(a, b);
}

template <int W>
mpf::MultiDouble<W> ew_scalar(EwOp op, const mpf::MultiDouble<W>& a,
                              const mpf::MultiDouble<W>& b) {
  if constexpr (W == 3) {
    if (op == EwOp::add_merge) return mpf::td_add_merge(a, b);
  }
  return op == EwOp::mul ? mpf::mul(a, b) : mpf::add(a, b);
}

}  // namespace detail

template <int W>
void ew_apply_into(MPMatrix<W>& out, const MPMatrix<W>& a, const MPMatrix<W>& b,
                   EwOp op, KernelVariant variant = KernelVariant::NORMAL) {
  if (!a.same_shape(b) || !a.same_shape(out))
    throw std::invalid_argument("ew: shape mismatch");
  if (op == EwOp::add_merge && W != 3)
    throw std::invalid_argument("ew: add_merge is a triple-width operation");
  if (variant == KernelVariant::NORMAL) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        out.set(i, j, detail::ew_scalar<W>(op, a.at(i, j), b.at(i, j)));
  } else {
    mpf::detail::with_backend([&](auto tag) {
      using Tag = decltype(tag);
      const bool ls = variant == KernelVariant::SIMD_LOADSTORE;
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.stride(); j += simd::lane_count) {
          const std::size_t off = i * a.stride() + j;
          if (ls) {
            using Mv = detail::LoadStoreMover<Tag>;
            detail::store_quad<W, Mv>(
                out, off,
                detail::ew_packed<W, Tag>(op, detail::load_quad<W, Mv>(a, off),
                                          detail::load_quad<W, Mv>(b, off)));
          } else {
            using Mv = detail::SetMover<Tag>;
            detail::store_quad<W, Mv>(
                out, off,
                detail::ew_packed<W, Tag>(op, detail::load_quad<W, Mv>(a, off),
                                          detail::load_quad<W, Mv>(b, off)));
          }
        }
    });
    out.zero_pads();
  }
  auto& ctr = op == EwOp::mul ? detail::g_muls : detail::g_adds;
  ctr.fetch_add(a.rows() * a.cols(), std::memory_order_relaxed);
}

template <int W>
MPMatrix<W> ew_add(const MPMatrix<W>& a, const MPMatrix<W>& b,
                   KernelVariant variant = KernelVariant::NORMAL) {
  MPMatrix<W> r(a.rows(), a.cols());
  ew_apply_into(r, a, b, EwOp::add, variant);
  return r;
}

template <int W>
MPMatrix<W> ew_mul(const MPMatrix<W>& a, const MPMatrix<W>& b,
                   KernelVariant variant = KernelVariant::NORMAL) {
  MPMatrix<W> r(a.rows(), a.cols());
  ew_apply_into(r, a, b, EwOp::mul, variant);
  return r;
}

inline MPMatrix<3> ew_add_merge(const MPMatrix<3>& a, const MPMatrix<3>& b,
                                KernelVariant variant = KernelVariant::NORMAL) {
  MPMatrix<3> r(a.rows(), a.cols());
  ew_apply_into(r, a, b, EwOp::add_merge, variant);
  return r;
}

// ---------------------------------------------------------------------------
// Import/export. Binary: header {magic "MPFM", u32 version, u8 width,
// u64 rows/cols/stride} then the planes as little-endian binary64 —
// bit-exact round-trip. CSV: decimal strings at the format's round-trip
// digit count. Errors carry the path.
// ---------------------------------------------------------------------------

template <int W>
void save_matrix_binary(const MPMatrix<W>& m, const std::string& path);

template <int W>
MPMatrix<W> load_matrix_binary(const std::string& path);

template <int W>
void save_matrix_csv(const MPMatrix<W>& m, const std::string& path, int digits = 0);

template <int W>
MPMatrix<W> load_matrix_csv(const std::string& path);

extern template void save_matrix_binary<2>(const MPMatrix<2>&, const std::string&);
extern template void save_matrix_binary<3>(const MPMatrix<3>&, const std::string&);
extern template void save_matrix_binary<4>(const MPMatrix<4>&, const std::string&);
extern template MPMatrix<2> load_matrix_binary<2>(const std::string&);
extern template MPMatrix<3> load_matrix_binary<3>(const std::string&);
extern template MPMatrix<4> load_matrix_binary<4>(const std::string&);
extern template void save_matrix_csv<2>(const MPMatrix<2>&, const std::string&, int);
extern template void save_matrix_csv<3>(const MPMatrix<3>&, const std::string&, int);
extern template void save_matrix_csv<4>(const MPMatrix<4>&, const std::string&, int);
extern template MPMatrix<2> load_matrix_csv<2>(const std::string&);
extern template MPMatrix<3> load_matrix_csv<3>(const std::string&);
extern template MPMatrix<4> load_matrix_csv<4>(const std::string&);

}  // namespace mpfkit::linalg
