#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "dcd/kernels.hpp"

using dcd::kernels::Backend;
using cf64 = std::complex<double>;

namespace {

std::vector<cf64> random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> g;
  std::vector<cf64> v(n);
  for (auto& z : v) z = {scale * g(rng), scale * g(rng)};
  return v;
}

struct BackendGuard {
  Backend saved = dcd::kernels::active_backend();
  ~BackendGuard() { dcd::kernels::set_backend(saved); }
};

}  // namespace

TEST_CASE("cdotc matches a naive complex dot product") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 3u, 8u, 64u, 129u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    cf64 ref{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) ref += std::conj(a[i]) * b[i];
    const cf64 got = dcd::kernels::cdotc(a.data(), b.data(), n);
    CHECK(std::abs(got - ref) <= 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("cdotc of a vector with itself is its energy") {
  const std::vector<cf64> a = {{1.0, 0.0}, {0.0, 1.0}};
  const cf64 d = dcd::kernels::cdotc(a.data(), a.data(), 2);
  CHECK(d.real() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d.imag() == doctest::Approx(0.0).epsilon(1e-15));

  std::mt19937_64 rng(12);
  const auto v = random_vec(rng, 64);
  const cf64 self = dcd::kernels::cdotc(v.data(), v.data(), 64);
  const double e = dcd::kernels::norm2sq(v.data(), 64);
  CHECK(std::abs(self - cf64{e, 0.0}) <= 1e-12 * e);
}

TEST_CASE("norm2sq on a known vector") {
  const std::vector<cf64> a = {{3.0, 0.0}, {0.0, 4.0}};
  CHECK(dcd::kernels::norm2sq(a.data(), 2) == doctest::Approx(25.0).epsilon(1e-15));
}

TEST_CASE("caxpy matches elementwise complex arithmetic") {
  std::mt19937_64 rng(13);
  for (std::size_t n : {1u, 5u, 32u, 63u}) {
    const auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);
    const auto y0 = y;
    const cf64 alpha{0.7, -1.3};
    dcd::kernels::caxpy(alpha, x.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      const cf64 want = y0[i] + alpha * x[i];
      CHECK(std::abs(y[i] - want) <= 1e-14 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("binary16 rounding: exact cases") {
  auto r16 = [](double x) {
    dcd::kernels::round_fp16(&x, 1);
    return x;
  };
  CHECK(r16(1.0) == 1.0);
  CHECK(r16(-1.0) == -1.0);
  CHECK(r16(0.0) == 0.0);
  CHECK(r16(2049.0) == 2048.0);   // exact midpoint ties to the even neighbor
  CHECK(r16(2051.0) == 2052.0);
  // Just off a midpoint must round by sign of the offset, however small; a
  // detour through binary32 would collapse these onto the midpoint first.
  CHECK(r16(2049.0 + 0x1p-14) == 2050.0);
  CHECK(r16(2049.0 - 0x1p-14) == 2048.0);
  CHECK(r16(65504.0) == 65504.0); // largest finite binary16
  CHECK(r16(65519.9) == 65504.0);
  CHECK(std::isinf(r16(65520.0)));  // rounds past the largest finite value
  CHECK(std::isinf(r16(1e300)));
  CHECK(r16(-65520.0) == -std::numeric_limits<double>::infinity());
  CHECK(r16(0x1p-24) == 0x1p-24);     // smallest binary16 subnormal
  CHECK(r16(0x1p-25) == 0.0);         // ties to even at half the smallest
  CHECK(r16(0x1.8p-25) == 0x1p-24);
  CHECK(r16(0x1p-26) == 0.0);
  CHECK(r16(0x1p-14) == 0x1p-14);     // smallest normal
  CHECK(r16(1e-300) == 0.0);
  const double neg_zero = -0.0;
  CHECK(std::signbit(r16(neg_zero)));
  CHECK(std::isnan(r16(std::numeric_limits<double>::quiet_NaN())));
  CHECK(std::isinf(r16(std::numeric_limits<double>::infinity())));
}

TEST_CASE("binary16 rounding is idempotent and within half an ulp") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  for (int k = 0; k < 2000; ++k) {
    const int e = static_cast<int>(rng() % 30) - 15;
    const double x = std::ldexp(g(rng), e);
    double r = x;
    dcd::kernels::round_fp16(&r, 1);
    double r2 = r;
    dcd::kernels::round_fp16(&r2, 1);
    CHECK(r2 == r);
    if (std::abs(x) >= 0x1p-14 && std::abs(x) < 65504.0 && std::isfinite(r))
      CHECK(std::abs(r - x) <= std::ldexp(std::abs(x), -11));
  }
}

TEST_CASE("binary32 rounding equals a float cast") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g;
  for (int k = 0; k < 500; ++k) {
    const double x = std::ldexp(g(rng), static_cast<int>(rng() % 40) - 20);
    double r = x;
    dcd::kernels::round_fp32(&r, 1);
    CHECK(r == static_cast<double>(static_cast<float>(x)));
    double r2 = r;
    dcd::kernels::round_fp32(&r2, 1);
    CHECK(r2 == r);
  }
}

TEST_CASE("backend can be pinned and restored") {
  BackendGuard guard;
  dcd::kernels::set_backend(Backend::scalar);
  CHECK(dcd::kernels::active_backend() == Backend::scalar);
  CHECK(dcd::kernels::backend_available(Backend::scalar));
  CHECK(dcd::kernels::backend_name(Backend::scalar) == "scalar");
  const std::vector<cf64> a = {{1.0, 2.0}};
  CHECK(dcd::kernels::norm2sq(a.data(), 1) == doctest::Approx(5.0));
}

#if defined(DCD_HAVE_AVX2)

TEST_CASE("scalar and avx2 backends agree") {
  namespace det = dcd::kernels::detail;
  if (!dcd::kernels::backend_available(Backend::avx2)) {
    MESSAGE("avx2 backend not available; skipping");
    return;
  }
  std::mt19937_64 rng(16);

  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 16u, 33u, 128u, 1001u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);

    // Reductions may reorder lanes: tolerance comparison.
    const cf64 ds = det::cdotc_scalar(a.data(), b.data(), n);
    const cf64 dv = det::cdotc_avx2(a.data(), b.data(), n);
    CHECK(std::abs(ds - dv) <= 1e-12 * (1.0 + std::abs(ds)));
    const double ns = det::norm2sq_scalar(a.data(), n);
    const double nv = det::norm2sq_avx2(a.data(), n);
    CHECK(std::abs(ns - nv) <= 1e-12 * (1.0 + ns));

    // Elementwise update: bit-identical.
    auto y1 = b, y2 = b;
    const cf64 alpha{-0.33, 2.5};
    det::caxpy_scalar(alpha, a.data(), y1.data(), n);
    det::caxpy_avx2(alpha, a.data(), y2.data(), n);
    CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(cf64)) == 0);
  }
}

TEST_CASE("rounding kernels are bit-identical across backends") {
  namespace det = dcd::kernels::detail;
  if (!dcd::kernels::backend_available(Backend::avx2)) {
    MESSAGE("avx2 backend not available; skipping");
    return;
  }
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;

  std::vector<double> vals = {0.0,    -0.0,   1.0,     -1.0,    2049.0, 65504.0,
                              65520.0, 65519.9, 0x1p-24, 0x1p-25, 0x1p-26, 1e300,
                              -1e300,  1e-300, 0x1.8p-25, 2049.0 + 0x1p-14,
                              2049.0 - 0x1p-14, 65520.0 - 0x1p-8};
  for (int k = 0; k < 4000; ++k)
    vals.push_back(std::ldexp(g(rng), static_cast<int>(rng() % 36) - 18));

  auto a16 = vals, b16 = vals;
  det::round_fp16_scalar(a16.data(), a16.size());
  det::round_fp16_avx2(b16.data(), b16.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    CHECK(std::memcmp(&a16[i], &b16[i], sizeof(double)) == 0);
  }

  auto a32 = vals, b32 = vals;
  a32.push_back(std::numeric_limits<double>::quiet_NaN());
  b32.push_back(std::numeric_limits<double>::quiet_NaN());
  det::round_fp32_scalar(a32.data(), a32.size());
  det::round_fp32_avx2(b32.data(), b32.size());
  for (std::size_t i = 0; i < a32.size(); ++i) {
    if (std::isnan(a32[i]) || std::isnan(b32[i]))
      CHECK(std::isnan(a32[i]) == std::isnan(b32[i]));
    else
      CHECK(std::memcmp(&a32[i], &b32[i], sizeof(double)) == 0);
  }

  // NaN payloads may differ between the two routes, but NaN-ness must not.
  double n1 = std::numeric_limits<double>::quiet_NaN();
  double n2 = n1;
  det::round_fp16_scalar(&n1, 1);
  det::round_fp16_avx2(&n2, 1);
  CHECK(std::isnan(n1));
  CHECK(std::isnan(n2));
}

#endif  // DCD_HAVE_AVX2

TEST_CASE("kernels used through dispatch honor the pinned backend") {
  BackendGuard guard;
  std::mt19937_64 rng(18);
  const auto a = random_vec(rng, 37);
  const auto b = random_vec(rng, 37);

  dcd::kernels::set_backend(Backend::scalar);
  const cf64 ds = dcd::kernels::cdotc(a.data(), b.data(), 37);
  const cf64 dref = dcd::kernels::detail::cdotc_scalar(a.data(), b.data(), 37);
  CHECK(std::memcmp(&ds, &dref, sizeof(cf64)) == 0);

#if defined(DCD_HAVE_AVX2)
  if (dcd::kernels::backend_available(Backend::avx2)) {
    dcd::kernels::set_backend(Backend::avx2);
    const cf64 dv = dcd::kernels::cdotc(a.data(), b.data(), 37);
    const cf64 vref = dcd::kernels::detail::cdotc_avx2(a.data(), b.data(), 37);
    CHECK(std::memcmp(&dv, &vref, sizeof(cf64)) == 0);
  }
#endif
}
