#include "dcd/kernels.hpp"

#include <stdexcept>
#include <string>

namespace dcd::kernels {

namespace {

struct Table {
  cf64 (*cdotc)(const cf64*, const cf64*, std::size_t);
  void (*caxpy)(cf64, const cf64*, cf64*, std::size_t);
  double (*norm2sq)(const cf64*, std::size_t);
  void (*round_fp16)(double*, std::size_t);
  void (*round_fp32)(double*, std::size_t);
};

constexpr Table kScalarTable = {
    detail::cdotc_scalar, detail::caxpy_scalar, detail::norm2sq_scalar,
    detail::round_fp16_scalar, detail::round_fp32_scalar};

#if defined(DCD_HAVE_AVX2)
constexpr Table kAvx2Table = {
    detail::cdotc_avx2, detail::caxpy_avx2, detail::norm2sq_avx2,
    detail::round_fp16_avx2, detail::round_fp32_avx2};
#endif

bool cpu_has_avx2() {
#if defined(DCD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
         __builtin_cpu_supports("f16c");
#else
  return false;
#endif
}

Backend pick_default() { return cpu_has_avx2() ? Backend::avx2 : Backend::scalar; }

Backend g_backend = pick_default();

const Table& table_for(Backend b) {
#if defined(DCD_HAVE_AVX2)
  if (b == Backend::avx2) return kAvx2Table;
#endif
  (void)b;
  return kScalarTable;
}

const Table* g_table = &table_for(g_backend);

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
  }
  return false;
}

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error("kernel backend not available on this machine: " +
                             std::string(backend_name(b)));
  g_backend = b;
  g_table = &table_for(b);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

cf64 cdotc(const cf64* a, const cf64* b, std::size_t n) { return g_table->cdotc(a, b, n); }

void caxpy(cf64 alpha, const cf64* x, cf64* y, std::size_t n) { g_table->caxpy(alpha, x, y, n); }

double norm2sq(const cf64* a, std::size_t n) { return g_table->norm2sq(a, n); }

void round_fp16(double* p, std::size_t n) { g_table->round_fp16(p, n); }

void round_fp32(double* p, std::size_t n) { g_table->round_fp32(p, n); }

}  // namespace dcd::kernels
