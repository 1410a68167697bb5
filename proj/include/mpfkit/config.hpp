// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Set by the build system when AVX2+FMA code generation is enabled.
#ifndef MPFKIT_HAVE_AVX2
#define MPFKIT_HAVE_AVX2 0
#endif

// Checked builds validate preconditions that release builds assume
// (alignment of packed loads, exactness domain of quick_two_sum, ...).
// Independent of NDEBUG so test binaries can opt in under -O3.
#ifndef MPFKIT_CHECKED
#ifdef NDEBUG
#define MPFKIT_CHECKED 0
#else
#define MPFKIT_CHECKED 1
#endif
#endif

#if MPFKIT_CHECKED
#include <stdexcept>
#define MPFKIT_CHECK(cond, what)                      \
  do {                                                \
    if (!(cond)) throw std::invalid_argument(what);   \
  } while (0)
#else
#define MPFKIT_CHECK(cond, what) ((void)0)
#endif
