// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mpfkit/linalg.hpp"

namespace mpfkit::linalg {

namespace detail {
std::atomic<std::uint64_t> g_adds{0}, g_muls{0}, g_leaf_multiplies{0};
}  // namespace detail

void op_counters_reset() {
  detail::g_adds.store(0, std::memory_order_relaxed);
  detail::g_muls.store(0, std::memory_order_relaxed);
  detail::g_leaf_multiplies.store(0, std::memory_order_relaxed);
}

OpCounts op_counters_read() {
  OpCounts c;
  c.adds = detail::g_adds.load(std::memory_order_relaxed);
  c.muls = detail::g_muls.load(std::memory_order_relaxed);
  c.leaf_multiplies = detail::g_leaf_multiplies.load(std::memory_order_relaxed);
  return c;
}

}  // namespace mpfkit::linalg
