// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mpfkit::runtime {

// Which implementation the packed (4-lane) kernels dispatch to.
enum class Backend { hardware, portable };

// True when AVX2/FMA code paths were compiled in at all.
bool hardware_compiled() noexcept;

// True when compiled in AND the executing CPU reports AVX2+FMA.
bool hardware_available() noexcept;

// Backend used by the dispatching entry points. Resolved once on first use:
// MPFKIT_FORCE_PORTABLE=1 in the environment forces the portable backend,
// otherwise the hardware backend is chosen whenever it is available.
Backend active_backend();

// Test hook: override the active backend for the rest of the process.
void force_backend(Backend b);

// Verifies the floating-point environment the kernels are specified against:
// binary64 round-to-nearest-even and a correctly rounded fused multiply-add.
// Throws std::runtime_error if either probe fails. Runs automatically before
// the first active_backend() resolution.
void verify_fp_environment();

}  // namespace mpfkit::runtime
