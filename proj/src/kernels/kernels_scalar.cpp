#include "dcd/kernels.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace dcd::kernels::detail {

cf64 cdotc_scalar(const cf64* a, const cf64* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void caxpy_scalar(cf64 alpha, const cf64* x, cf64* y, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = px[2 * i], xi = px[2 * i + 1];
    py[2 * i] += ar * xr - ai * xi;
    py[2 * i + 1] += ar * xi + ai * xr;
  }
}

double norm2sq_scalar(const cf64* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double re = pa[2 * i], im = pa[2 * i + 1];
    acc += re * re + im * im;
  }
  return acc;
}

std::uint16_t f64_to_f16_bits(double x) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(x);
  const std::uint16_t sign = static_cast<std::uint16_t>((u >> 48) & 0x8000u);
  const int biased = static_cast<int>((u >> 52) & 0x7ff);
  const std::uint64_t man = u & 0xfffffffffffffULL;

  if (biased == 0x7ff) {
    if (man == 0) return static_cast<std::uint16_t>(sign | 0x7c00u);  // inf
    return static_cast<std::uint16_t>(sign | 0x7e00u);                // nan
  }
  if (biased == 0) return sign;  // double subnormals are far below 2^-24

  const int e = biased - 1023;
  if (e >= 16) return static_cast<std::uint16_t>(sign | 0x7c00u);

  // 53-bit significand; value = sig * 2^(e-52).
  const std::uint64_t sig = man | (1ULL << 52);
  int shift = (e >= -14) ? 42 : 42 + (-14 - e);
  if (shift > 62) shift = 62;  // deep underflow, rounds to zero below

  const std::uint64_t half = 1ULL << (shift - 1);
  const std::uint64_t rem = sig & ((1ULL << shift) - 1);
  const std::uint16_t keep = static_cast<std::uint16_t>(sig >> shift);

  // Normal results carry the implicit bit in `keep`, so bias the exponent by
  // one less; rounding then carries cleanly into the exponent field (and to
  // infinity past the largest finite value).
  std::uint16_t h =
      (e >= -14) ? static_cast<std::uint16_t>(((e + 14) << 10) + keep) : keep;
  if (rem > half || (rem == half && (h & 1u))) ++h;
  return static_cast<std::uint16_t>(sign | h);
}

double f16_bits_to_f64(std::uint16_t h) {
  const int sign = h >> 15;
  const int e = (h >> 10) & 0x1f;
  const int man = h & 0x3ff;
  double v;
  if (e == 0x1f) {
    v = man ? std::numeric_limits<double>::quiet_NaN()
            : std::numeric_limits<double>::infinity();
  } else if (e == 0) {
    v = std::ldexp(static_cast<double>(man), -24);
  } else {
    v = std::ldexp(static_cast<double>(man | 0x400), e - 25);
  }
  return sign ? -v : v;
}

void round_fp16_scalar(double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = f16_bits_to_f64(f64_to_f16_bits(p[i]));
}

void round_fp32_scalar(double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(static_cast<float>(p[i]));
}

}  // namespace dcd::kernels::detail
