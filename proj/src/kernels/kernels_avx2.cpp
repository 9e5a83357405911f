#include "dcd/kernels.hpp"

#if defined(DCD_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))

#include <immintrin.h>

namespace dcd::kernels::detail {

// Two complex doubles per 256-bit register, interleaved (re0 im0 re1 im1).

cf64 cdotc_avx2(const cf64* a, const cf64* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d racc = _mm256_setzero_pd();
  __m256d iacc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n2 = n & ~std::size_t(1);
  for (; i < n2; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    racc = _mm256_fmadd_pd(va, vb, racc);
    const __m256d vbs = _mm256_permute_pd(vb, 0x5);  // swap re/im per pair
    iacc = _mm256_fmadd_pd(va, vbs, iacc);
  }
  alignas(32) double rr[4], ii[4];
  _mm256_store_pd(rr, racc);
  _mm256_store_pd(ii, iacc);
  double re = (rr[0] + rr[1]) + (rr[2] + rr[3]);
  double im = (ii[0] - ii[1]) + (ii[2] - ii[3]);
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

void caxpy_avx2(cf64 alpha, const cf64* x, cf64* y, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set1_pd(ai);
  std::size_t i = 0;
  const std::size_t n2 = n & ~std::size_t(1);
  for (; i < n2; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d vxs = _mm256_permute_pd(vx, 0x5);
    // (ar*xr - ai*xi, ar*xi + ai*xr): addsub keeps the products unfused so
    // the result matches the scalar backend bit for bit.
    const __m256d upd =
        _mm256_addsub_pd(_mm256_mul_pd(var, vx), _mm256_mul_pd(vai, vxs));
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(_mm256_loadu_pd(py + 2 * i), upd));
  }
  for (; i < n; ++i) {
    const double xr = px[2 * i], xi = px[2 * i + 1];
    py[2 * i] += ar * xr - ai * xi;
    py[2 * i + 1] += ar * xi + ai * xr;
  }
}

double norm2sq_avx2(const cf64* a, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n2 = n & ~std::size_t(1);
  for (; i < n2; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  alignas(32) double t[4];
  _mm256_store_pd(t, acc);
  double s = (t[0] + t[1]) + (t[2] + t[3]);
  for (; i < n; ++i) {
    const double re = pa[2 * i], im = pa[2 * i + 1];
    s += re * re + im * im;
  }
  return s;
}

void round_fp16_avx2(double* p, std::size_t n) {
  // A cvtpd_ps/cvtps_ph pipeline rounds twice: doubles that land exactly on a
  // binary16 midpoint after the binary32 step then tie the wrong way. Half
  // rounding must come straight from the binary64 value, so it stays scalar.
  round_fp16_scalar(p, n);
}

void round_fp32_avx2(double* p, std::size_t n) {
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t(3);
  for (; i < n4; i += 4) {
    const __m256d v = _mm256_loadu_pd(p + i);
    _mm256_storeu_pd(p + i, _mm256_cvtps_pd(_mm256_cvtpd_ps(v)));
  }
  if (i < n) round_fp32_scalar(p + i, n - i);
}

}  // namespace dcd::kernels::detail

#endif
