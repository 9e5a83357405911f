/**
 * @file kernels.hpp
 * @brief Hot-loop complex vector kernels with runtime-selected SIMD backends.
 *
 * Every kernel operates on contiguous arrays of std::complex<double>
 * (interleaved re/im pairs) or, for the precision-rounding kernels, on raw
 * double arrays. Two backends exist:
 *
 *  - scalar: the reference implementation. Reductions accumulate
 *    sequentially in ascending index order and the translation unit is
 *    compiled without fused contractions, so results are bit-stable for a
 *    given build.
 *  - avx2: AVX2/FMA. Reductions split across lanes, so cdotc/norm2sq may
 *    differ from the scalar backend in the last bits; caxpy and the rounding
 *    kernels are bit-identical to the scalar backend. Binary16 rounding is
 *    scalar on every backend: routing it through binary32 conversions would
 *    round twice and misplace values near binary16 midpoints.
 *
 * The active backend is chosen once at startup (best available) and can be
 * pinned with set_backend(); all higher layers go through this dispatch
 * table, so pinning the backend pins the arithmetic of the whole library.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dcd::kernels {

using cf64 = std::complex<double>;

enum class Backend { scalar, avx2 };

/// Backend currently installed in the dispatch table.
Backend active_backend();

/// True if this build/CPU can run the given backend.
bool backend_available(Backend b);

/// Pin the dispatch table to a backend. Throws std::runtime_error if it is
/// not available on this machine.
void set_backend(Backend b);

std::string_view backend_name(Backend b);

/// sum_i conj(a[i]) * b[i]
cf64 cdotc(const cf64* a, const cf64* b, std::size_t n);

/// y[i] += alpha * x[i]
void caxpy(cf64 alpha, const cf64* x, cf64* y, std::size_t n);

/// sum_i |a[i]|^2
double norm2sq(const cf64* a, std::size_t n);

/// In-place round of each double to the nearest binary16 value
/// (ties-to-even), widened back to double. Overflow saturates to infinity,
/// NaN stays NaN (payload unspecified).
void round_fp16(double* p, std::size_t n);

/// In-place round of each double to the nearest binary32 value, widened back.
void round_fp32(double* p, std::size_t n);

namespace detail {

// Scalar reference implementations, exported for backend equivalence tests.
cf64 cdotc_scalar(const cf64* a, const cf64* b, std::size_t n);
void caxpy_scalar(cf64 alpha, const cf64* x, cf64* y, std::size_t n);
double norm2sq_scalar(const cf64* a, std::size_t n);
void round_fp16_scalar(double* p, std::size_t n);
void round_fp32_scalar(double* p, std::size_t n);

// Bit-level binary16 conversions used by the scalar rounding kernel.
std::uint16_t f64_to_f16_bits(double x);
double f16_bits_to_f64(std::uint16_t h);

#if defined(DCD_HAVE_AVX2)
cf64 cdotc_avx2(const cf64* a, const cf64* b, std::size_t n);
void caxpy_avx2(cf64 alpha, const cf64* x, cf64* y, std::size_t n);
double norm2sq_avx2(const cf64* a, std::size_t n);
void round_fp16_avx2(double* p, std::size_t n);
void round_fp32_avx2(double* p, std::size_t n);
#endif

}  // namespace detail

}  // namespace dcd::kernels
