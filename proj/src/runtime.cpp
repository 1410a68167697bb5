// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mpfkit/runtime.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "mpfkit/config.hpp"

namespace mpfkit::runtime {
namespace {

// volatile keeps the constant folder from evaluating the probes at
// compile time with whatever rounding the compiler assumes.
bool rounding_is_nearest_even() {
  volatile double one = 1.0;
  volatile double tiny = 0x1p-53;       // half ulp of 1.0
  volatile double three_half = 0x1.8p-53;

  // ties round to even, in both directions (rules out to-zero / directed modes)
  if (one + tiny != 1.0) return false;
  if (-one - tiny != -1.0) return false;
  // just above the tie rounds away
  if (one + three_half != 1.0 + 0x1p-52) return false;
  if (-one - three_half != -1.0 - 0x1p-52) return false;
  return true;
}

bool fma_is_fused() {
  // (2^27+1)^2 = 2^54 + 2^28 + 1; the +1 survives only a single rounding.
  volatile double a = 0x1p27 + 1.0;
  volatile double c = -(0x1p54 + 0x1p28);
  return std::fma(a, a, c) == 1.0;
}

bool cpu_has_avx2_fma() {
#if MPFKIT_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot = [] {
    verify_fp_environment();
    const char* force = std::getenv("MPFKIT_FORCE_PORTABLE");
    if (force != nullptr && force[0] == '1' && force[1] == '\0')
      return Backend::portable;
    return hardware_available() ? Backend::hardware : Backend::portable;
  }();
  return slot;
}

}  // namespace

bool hardware_compiled() noexcept { return MPFKIT_HAVE_AVX2 != 0; }

bool hardware_available() noexcept {
  static const bool ok = cpu_has_avx2_fma();
  return hardware_compiled() && ok;
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void force_backend(Backend b) { backend_slot().store(b, std::memory_order_relaxed); }

void verify_fp_environment() {
  if (!rounding_is_nearest_even())
    throw std::runtime_error(
        "mpfkit: binary64 arithmetic is not rounding to nearest-even; "
        "the extended-precision kernels are unusable in this environment");
  if (!fma_is_fused())
    throw std::runtime_error(
        "mpfkit: std::fma is not a correctly rounded fused multiply-add; "
        "the extended-precision kernels are unusable in this environment");
}

}  // namespace mpfkit::runtime
